#include "tumbler/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace tumbler {

namespace {

// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

// Parses a decimal number occupying the whole string.
bool parse_number(std::string_view s, double& out) {
  if (s.empty()) return false;
  const std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#17becf", "#bcbd22", "#e377c2", "#7f7f7f"};

void append_fmt(std::string& out, const char* fmt, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  out += buf;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_angle(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty angle literal");
  const size_t pos = s.find("pi");
  if (pos == std::string_view::npos) {
    double value = 0.0;
    if (!parse_number(s, value)) {
      throw std::invalid_argument("malformed angle literal: " + std::string(text));
    }
    return value;
  }
  // coefficient * pi [/ divisor]
  const std::string_view coef_part = trim(s.substr(0, pos));
  std::string_view rest = trim(s.substr(pos + 2));
  double coef = 1.0;
  if (!coef_part.empty()) {
    std::string_view c = coef_part;
    if (!c.empty() && c.back() == '*') c = trim(c.substr(0, c.size() - 1));
    if (!parse_number(c, coef)) {
      throw std::invalid_argument("malformed angle coefficient: " + std::string(text));
    }
  }
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') {
      throw std::invalid_argument("malformed angle literal: " + std::string(text));
    }
    if (!parse_number(trim(rest.substr(1)), divisor) || divisor == 0.0) {
      throw std::invalid_argument("malformed angle divisor: " + std::string(text));
    }
  }
  return coef * std::numbers::pi / divisor;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path);
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  std::string line;
  for (size_t i = 0; i < columns.size(); ++i) {
    if (i > 0) line += ',';
    line += columns[i];
  }
  line += '\n';
  out_ << line;
}

CsvWriter::Row::~Row() {
  line_ += '\n';
  writer_.out_ << line_;
  ++writer_.rows_;
}

CsvWriter::Row& CsvWriter::Row::col(double v) {
  if (!first_) line_ += ',';
  first_ = false;
  line_ += format_full(v);
  return *this;
}

CsvWriter::Row& CsvWriter::Row::col(int v) {
  if (!first_) line_ += ',';
  first_ = false;
  line_ += std::to_string(v);
  return *this;
}

CsvWriter::Row& CsvWriter::Row::col(const std::string& v) {
  if (!first_) line_ += ',';
  first_ = false;
  line_ += v;
  return *this;
}

std::string render_scatter_svg(const std::vector<SvgSeries>& series, int size_px,
                               const std::string& title) {
  const double half = size_px / 2.0;
  const double scale = half / 1.1;  // data range [-1.1, 1.1] fills the canvas
  const auto px = [&](double u) { return half + scale * u; };
  const auto py = [&](double v) { return half - scale * v; };

  std::string svg;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                size_px, size_px, size_px, size_px);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" "
                "stroke=\"#888\" stroke-width=\"1\"/>\n",
                half, half, scale);
  svg += buf;
  if (!title.empty()) {
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.2f\" y=\"20\" text-anchor=\"middle\" "
                  "font-family=\"sans-serif\" font-size=\"14\">",
                  half);
    svg += buf;
    svg += title;
    svg += "</text>\n";
  }
  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    if (series[i].connect) {
      svg += "<polyline fill=\"none\" stroke=\"";
      svg += color;
      svg += "\" stroke-width=\"1\" points=\"";
      for (const auto& [u, v] : series[i].points) {
        append_fmt(svg, "%.2f,%.2f ", px(u), py(v));
      }
      svg += "\"/>\n";
    } else {
      for (const auto& [u, v] : series[i].points) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"1.2\" fill=\"%s\"/>\n", px(u),
                      py(v), color);
        svg += buf;
      }
    }
  }
  svg += "</svg>\n";
  return svg;
}

void write_metadata(const std::string& path, const RunMetadata& meta) {
  nlohmann::json j;
  j["tool"] = meta.tool;
  j["subcommand"] = meta.subcommand;
  j["config"] = meta.config;  // std::map keeps keys sorted -> deterministic
  j["rng_seed"] = meta.rng_seed;
  j["wall_seconds"] = meta.wall_seconds;
  j["rows"] = meta.rows;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open metadata file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace tumbler
