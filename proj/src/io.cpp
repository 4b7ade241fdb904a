#include "ratelab/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace ratelab {

namespace {

void open_or_throw(std::ofstream& out, const std::string& path) {
  out.open(path, std::ios::binary);  // binary: identical bytes on every platform
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
}

std::string csv_header(const GridSpace& space, const std::string& tail) {
  std::string header;
  for (int axis = 0; axis < space.dim(); ++axis) {
    header += "x_" + std::to_string(axis + 1) + ",";
  }
  header += tail;
  return header;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_value(double v) {
  if (std::isnan(v)) throw std::invalid_argument("format_value: NaN has no representation");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_value(const ExtendedValue& v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  return format_value(v.value());
}

void write_grid_function_csv(const std::string& path, const GridFunction& f) {
  std::ofstream out;
  open_or_throw(out, path);
  out << csv_header(f.space(), "value") << '\n';
  for (std::size_t flat = 0; flat < f.space().size(); ++flat) {
    for (int axis = 0; axis < f.space().dim(); ++axis) {
      out << format_value(f.space().coord(flat, axis)) << ',';
    }
    out << format_value(f.value(flat)) << '\n';
  }
}

void write_rate_field_csv(const std::string& path, const RateField& rate) {
  std::ofstream out;
  open_or_throw(out, path);
  out << csv_header(rate.space(), "value") << '\n';
  for (std::size_t flat = 0; flat < rate.space().size(); ++flat) {
    for (int axis = 0; axis < rate.space().dim(); ++axis) {
      out << format_value(rate.space().coord(flat, axis)) << ',';
    }
    out << format_value(rate.value(flat)) << '\n';
  }
}

void write_exposed_csv(const std::string& path, const ExposedSet& exposed) {
  std::size_t param_width = 0;
  for (const auto& p : exposed.param) param_width = std::max(param_width, p.size());

  std::ofstream out;
  open_or_throw(out, path);
  std::string header = csv_header(exposed.space, "exposed,nice");
  for (std::size_t k = 0; k < param_width; ++k) header += ",param_" + std::to_string(k + 1);
  out << header << '\n';
  for (std::size_t flat = 0; flat < exposed.space.size(); ++flat) {
    for (int axis = 0; axis < exposed.space.dim(); ++axis) {
      out << format_value(exposed.space.coord(flat, axis)) << ',';
    }
    out << (exposed.exposed[flat] ? '1' : '0') << ',' << (exposed.nice[flat] ? '1' : '0');
    for (std::size_t k = 0; k < param_width; ++k) {
      out << ',';
      if (k < exposed.param[flat].size()) out << format_value(exposed.param[flat][k]);
    }
    out << '\n';
  }
}

void write_sweep_csv(const std::string& path,
                     const std::vector<std::pair<int, ExtendedValue>>& sweep) {
  std::ofstream out;
  open_or_throw(out, path);
  out << "n,value\n";
  for (const auto& [n, v] : sweep) out << n << ',' << format_value(v) << '\n';
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out;
  open_or_throw(out, path);
  out << j.dump(2) << '\n';
}

ValueTable read_value_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");

  ValueTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty()) {
      if (line_no == 1) throw std::runtime_error(path + ":1: empty header");
      continue;  // ignore trailing blank lines
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      cells.push_back(trim(body.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (line_no == 1) {
      table.header = cells;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " cells, got " +
                               std::to_string(cells.size()));
    }
    std::vector<ExtendedValue> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) {
      if (cell == "inf") {
        row.push_back(ExtendedValue::pos_inf());
      } else if (cell == "-inf") {
        row.push_back(ExtendedValue::neg_inf());
      } else if (cell.empty()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty cell");
      } else {
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() ||
            !std::isfinite(v)) {
          throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" +
                                   cell + "'");
        }
        row.push_back(ExtendedValue(v));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw std::runtime_error(path + ":1: missing header");
  return table;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

// Tick positions at multiples of 1/2/5 * 10^k covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) {
    hi = lo + 1.0;
    lo -= 1.0;
  }
  const double raw = (hi - lo) / std::max(target, 2);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + step * 1e-9; t += step) {
    const double snapped = std::abs(t) < step * 1e-9 ? 0.0 : t;
    ticks.push_back(snapped);
  }
  return ticks;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series) {
  if (series.empty()) throw std::invalid_argument("write_svg_plot: no series");
  if (series.size() > 3) throw std::invalid_argument("write_svg_plot: at most 3 series");
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("write_svg_plot: x/y length mismatch in '" + s.label + "'");
    }
  }

  const double width = 800, height = 500;
  const double ml = 70, mr = 20, mt = 20, mb = 50;
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const PlotSeries& s : series) {
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!s.y[k].is_finite()) continue;
      xlo = std::min(xlo, s.x[k]);
      xhi = std::max(xhi, s.x[k]);
      ylo = std::min(ylo, s.y[k].value());
      yhi = std::max(yhi, s.y[k].value());
    }
  }
  if (!std::isfinite(xlo)) {  // nothing finite to plot
    xlo = 0;
    xhi = 1;
    ylo = 0;
    yhi = 1;
  }
  if (xhi == xlo) xhi = xlo + 1;
  if (yhi == ylo) yhi = ylo + 1;
  const double ypad = (yhi - ylo) * 0.05;
  ylo -= ypad;
  yhi += ypad;

  const auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr); };
  const auto py = [&](double y) {
    return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb);
  };

  static const char* colors[3] = {"#1f77b4", "#d62728", "#2ca02c"};

  std::ofstream out;
  open_or_throw(out, path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  out << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n";

  // Axes.
  out << "<line x1=\"" << format_value(ml) << "\" y1=\"" << format_value(height - mb)
      << "\" x2=\"" << format_value(width - mr) << "\" y2=\"" << format_value(height - mb)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << format_value(ml) << "\" y1=\"" << format_value(mt) << "\" x2=\""
      << format_value(ml) << "\" y2=\"" << format_value(height - mb)
      << "\" stroke=\"black\"/>\n";
  for (double t : nice_ticks(xlo, xhi, 6)) {
    if (t < xlo - 1e-12 || t > xhi + 1e-12) continue;
    const double gx = px(t);
    out << "<line x1=\"" << format_value(gx) << "\" y1=\"" << format_value(height - mb)
        << "\" x2=\"" << format_value(gx) << "\" y2=\"" << format_value(height - mb + 5)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << format_value(gx) << "\" y=\"" << format_value(height - mb + 20)
        << "\" font-size=\"12\" text-anchor=\"middle\">" << format_value(t) << "</text>\n";
  }
  for (double t : nice_ticks(ylo, yhi, 6)) {
    if (t < ylo - 1e-12 || t > yhi + 1e-12) continue;
    const double gy = py(t);
    out << "<line x1=\"" << format_value(ml - 5) << "\" y1=\"" << format_value(gy)
        << "\" x2=\"" << format_value(ml) << "\" y2=\"" << format_value(gy)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << format_value(ml - 8) << "\" y=\"" << format_value(gy + 4)
        << "\" font-size=\"12\" text-anchor=\"end\">" << format_value(t) << "</text>\n";
  }

  // Series: polylines broken at non-finite samples.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const PlotSeries& s = series[si];
    std::vector<std::string> runs;
    std::string current;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!s.y[k].is_finite()) {
        if (!current.empty()) runs.push_back(current);
        current.clear();
        continue;
      }
      if (!current.empty()) current += ' ';
      current += format_value(px(s.x[k])) + "," + format_value(py(s.y[k].value()));
    }
    if (!current.empty()) runs.push_back(current);
    for (const std::string& pts : runs) {
      out << "<polyline fill=\"none\" stroke=\"" << colors[si]
          << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    }
    // Legend entry.
    const double ly = mt + 18.0 * si + 10.0;
    out << "<line x1=\"" << format_value(width - mr - 150) << "\" y1=\"" << format_value(ly)
        << "\" x2=\"" << format_value(width - mr - 120) << "\" y2=\"" << format_value(ly)
        << "\" stroke=\"" << colors[si] << "\" stroke-width=\"1.5\"/>\n";
    out << "<text x=\"" << format_value(width - mr - 114) << "\" y=\"" << format_value(ly + 4)
        << "\" font-size=\"12\">" << xml_escape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace ratelab
