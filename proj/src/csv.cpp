#include "spinctrl/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinctrl/errors.hpp"

namespace spinctrl {

std::string format_sig17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out << text;
    if (!out.good()) throw ConfigError("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename " + tmp + " to " + path);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_sig17(row[i]);
    out << "\n";
  }
  write_text_atomic(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = cells;
      first = false;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &pos);
      } catch (const std::exception&) {
        throw ConfigError(path + ": malformed numeric cell '" + c + "'");
      }
      if (pos != c.size())
        throw ConfigError(path + ": malformed numeric cell '" + c + "'");
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      throw ConfigError(path + ": row width differs from header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::string column_name(const GridAxis& axis) {
  if (axis.unit.empty()) return axis.name;
  std::string unit = axis.unit;
  for (char& c : unit) c = char(std::tolower(static_cast<unsigned char>(c)));
  return axis.name + "_" + unit;
}

}  // namespace

void write_coherence_map_csv(const CoherenceMap& map, const std::string& path) {
  std::vector<std::string> header;
  for (const auto& a : map.axes) header.push_back(column_name(a));
  header.push_back("signal");

  std::vector<std::vector<double>> rows;
  if (map.axes.size() == 1) {
    for (std::size_t i = 0; i < map.values.size(); ++i)
      rows.push_back({map.axes[0].values[i], map.values[i]});
  } else if (map.axes.size() == 2) {
    const std::size_t nc = map.axes[1].values.size();
    for (std::size_t i = 0; i < map.axes[0].values.size(); ++i)
      for (std::size_t j = 0; j < nc; ++j)
        rows.push_back({map.axes[0].values[i], map.axes[1].values[j],
                        map.values[i * nc + j]});
  } else {
    throw ConfigError("write_coherence_map_csv: only 1-D and 2-D maps");
  }
  write_csv(path, header, rows);
}

}  // namespace spinctrl
