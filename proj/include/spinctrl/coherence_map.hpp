// Gridded coherence results shared by the sequence engines.
#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinctrl {

/// One sweep axis: values carry the unit named in `unit` (interface units,
/// i.e. Hz for frequencies and seconds for times).
struct GridAxis {
  std::string name;
  std::string unit;
  std::vector<double> values;
};

/// 1-D or 2-D coherence data over the listed axes.  For two axes the layout
/// is row-major with axes[0] slowest.  `meta` carries scalar context such as
/// the interpulse delay a calibration curve was taken at.
struct CoherenceMap {
  std::vector<GridAxis> axes;
  std::vector<double> values;
  std::map<std::string, double> meta;

  std::size_t expected_size() const {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.values.size();
    return n;
  }

  double at(std::size_t i) const { return values.at(i); }

  double at(std::size_t i, std::size_t j) const {
    if (axes.size() != 2) throw std::logic_error("CoherenceMap::at: not 2-D");
    return values.at(i * axes[1].values.size() + j);
  }
};

}  // namespace spinctrl
