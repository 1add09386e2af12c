// Output formatting shared by the command-line tool and the tests:
// full-precision number formatting, rotation-angle literals, CSV and SVG
// emission, and the JSON run-metadata sidecar.  All emitters are
// deterministic: identical inputs produce byte-identical files.
#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tumbler {

// Shortest representation that round-trips a double (17 significant
// digits).
std::string format_full(double v);

// Parses a rotation-angle literal: "pi", "2pi/3", "19pi/20", "0.5pi", or a
// plain decimal number of radians.  Throws std::invalid_argument on
// malformed input.
double parse_angle(std::string_view text);

// Minimal CSV emitter: one header row, then data rows; numbers are written
// with format_full.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void header(const std::vector<std::string>& columns);

  class Row {
   public:
    explicit Row(CsvWriter& w) : writer_(w) {}
    ~Row();
    Row& col(double v);
    Row& col(int v);
    Row& col(const std::string& v);

   private:
    CsvWriter& writer_;
    std::string line_;
    bool first_ = true;
  };
  Row row() { return Row(*this); }

  size_t rows_written() const { return rows_; }

 private:
  friend class Row;
  std::ofstream out_;
  size_t rows_ = 0;
};

// One polyline/point-cloud series of an SVG scatter plot.
struct SvgSeries {
  std::vector<std::pair<double, double>> points;
  bool connect = false;  // polyline instead of dots
};

// Renders series into a square scatter plot over [-1,1]^2 with the unit
// circle drawn for reference; colors cycle through a fixed palette.
std::string render_scatter_svg(const std::vector<SvgSeries>& series, int size_px = 800,
                               const std::string& title = "");

// Sidecar describing one CLI run; serialised as JSON next to the CSV so a
// result file is reproducible from its metadata alone.
struct RunMetadata {
  std::string tool;              // name + version
  std::string subcommand;
  std::map<std::string, std::string> config;  // flags, fully resolved
  std::uint64_t rng_seed = 0;
  double wall_seconds = 0.0;
  std::size_t rows = 0;
};
void write_metadata(const std::string& path, const RunMetadata& meta);

}  // namespace tumbler
