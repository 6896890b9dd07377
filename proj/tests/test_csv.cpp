#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "spinctrl/csv.hpp"
#include "spinctrl/errors.hpp"

using namespace spinctrl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "spinctrl_csv_test") {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("17-digit formatting round trips doubles exactly") {
  std::mt19937_64 engine(51);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mantissa(engine), exponent(engine));
    const std::string text = format_sig17(x);
    CHECK(std::strtod(text.c_str(), nullptr) == x);
  }
  CHECK(format_sig17(0.0) == "0");
  CHECK(std::strtod(format_sig17(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
}

TEST_CASE("table write and read round trip") {
  TempDir dir;
  const std::string path = dir.file("table.csv");
  const std::vector<std::string> header{"a", "b", "c"};
  const std::vector<std::vector<double>> rows{
      {1.0, -2.5, 3.3333333333333333},
      {1e-300, 6.023e23, -0.0},
  };
  write_csv(path, header, rows);
  const CsvTable table = read_csv(path);
  CHECK(table.header == header);
  REQUIRE(table.rows.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      CHECK(table.rows[i][j] == rows[i][j]);

  // No leftover temporary from the atomic write.
  CHECK(!fs::exists(path + ".tmp"));
}

TEST_CASE("read failures raise configuration errors") {
  TempDir dir;
  CHECK_THROWS_AS(read_csv(dir.file("missing.csv")), ConfigError);

  {
    std::ofstream out(dir.file("bad_cell.csv"));
    out << "x,y\n1.0,oops\n";
  }
  CHECK_THROWS_AS(read_csv(dir.file("bad_cell.csv")), ConfigError);

  {
    std::ofstream out(dir.file("bad_suffix.csv"));
    out << "x\n1.0junk\n";
  }
  CHECK_THROWS_AS(read_csv(dir.file("bad_suffix.csv")), ConfigError);

  {
    std::ofstream out(dir.file("ragged.csv"));
    out << "x,y\n1.0\n";
  }
  CHECK_THROWS_AS(read_csv(dir.file("ragged.csv")), ConfigError);

  // Windows line endings and blank lines are tolerated.
  {
    std::ofstream out(dir.file("crlf.csv"));
    out << "x,y\r\n\r\n1.5,2.5\r\n";
  }
  const CsvTable table = read_csv(dir.file("crlf.csv"));
  CHECK(table.rows.size() == 1);
  CHECK(table.rows[0][1] == 2.5);
}

TEST_CASE("coherence map serialization") {
  TempDir dir;

  CoherenceMap line;
  line.axes = {{"tau", "s", {1e-6, 2e-6, 3e-6}}};
  line.values = {0.5, -0.25, 1.0};
  write_coherence_map_csv(line, dir.file("line.csv"));
  const CsvTable l = read_csv(dir.file("line.csv"));
  CHECK(l.header == std::vector<std::string>{"tau_s", "signal"});
  REQUIRE(l.rows.size() == 3);
  CHECK(l.rows[1][0] == 2e-6);
  CHECK(l.rows[1][1] == -0.25);

  CoherenceMap grid;
  grid.axes = {{"omega_bar", "Hz", {10.0, 20.0}},
               {"omega_rf", "Hz", {1.0, 2.0, 3.0}}};
  grid.values = {1, 2, 3, 4, 5, 6};
  write_coherence_map_csv(grid, dir.file("grid.csv"));
  const CsvTable g = read_csv(dir.file("grid.csv"));
  CHECK(g.header ==
        std::vector<std::string>{"omega_bar_hz", "omega_rf_hz", "signal"});
  REQUIRE(g.rows.size() == 6);
  // Row-major: the first axis varies slowest.
  CHECK(g.rows[0] == std::vector<double>{10.0, 1.0, 1.0});
  CHECK(g.rows[4] == std::vector<double>{20.0, 2.0, 5.0});

  CoherenceMap axisless;
  CHECK_THROWS_AS(write_coherence_map_csv(axisless, dir.file("bad.csv")),
                  ConfigError);

  // Unit-free axes drop the suffix.
  CoherenceMap plain;
  plain.axes = {{"n_pulses", "", {2.0, 4.0}}};
  plain.values = {0.1, 0.2};
  write_coherence_map_csv(plain, dir.file("plain.csv"));
  CHECK(read_csv(dir.file("plain.csv")).header ==
        std::vector<std::string>{"n_pulses", "signal"});
}

TEST_CASE("atomic text write replaces the target in one step") {
  TempDir dir;
  const std::string path = dir.file("note.txt");
  write_text_atomic(path, "first\n");
  write_text_atomic(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK(!fs::exists(path + ".tmp"));
}
