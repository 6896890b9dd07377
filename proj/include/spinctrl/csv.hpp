// CSV persistence with reproducible formatting.
//
// All floating-point values are written with 17 significant digits ("%.17g"),
// which round-trips doubles exactly and makes repeated runs byte-identical.
// Files are written to a temporary sibling and renamed into place.
#pragma once

#include <string>
#include <vector>

#include "spinctrl/coherence_map.hpp"

namespace spinctrl {

/// "%.17g" formatting of one value.
std::string format_sig17(double x);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Throws ConfigError on missing files or malformed numeric cells.
CsvTable read_csv(const std::string& path);

/// 1-D maps become (axis, signal) rows; 2-D maps long-format
/// (axis0, axis1, signal) rows in row-major order.
void write_coherence_map_csv(const CoherenceMap& map, const std::string& path);

/// Write `text` atomically (temporary file + rename).
void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace spinctrl
