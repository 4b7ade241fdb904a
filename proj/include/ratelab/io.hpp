#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ratelab/convex_integral.hpp"
#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"
#include "ratelab/testing_family.hpp"

namespace ratelab {

// Shortest round-trip decimal representation; infinities render as
// "inf" / "-inf". All file emitters below go through this, which is what
// makes outputs byte-identical across runs.
std::string format_value(double v);
std::string format_value(const ExtendedValue& v);

// CSV, header `x_1,...,x_d,value`, rows in flat-index order.
void write_grid_function_csv(const std::string& path, const GridFunction& f);
void write_rate_field_csv(const std::string& path, const RateField& rate);

// CSV, header `x_1,...,x_d,exposed,nice,param_1,...`; param columns are
// empty for unexposed points.
void write_exposed_csv(const std::string& path, const ExposedSet& exposed);

// CSV, header `n,value`: one per-scale entropy sweep.
void write_sweep_csv(const std::string& path,
                     const std::vector<std::pair<int, ExtendedValue>>& sweep);

void write_json_file(const std::string& path, const json& j);

// Generic numeric table reader for the CSV schemas above ("inf"/"-inf"
// accepted, empty cells rejected); throws std::runtime_error with a line
// number on malformed input.
struct ValueTable {
  std::vector<std::string> header;
  std::vector<std::vector<ExtendedValue>> rows;
};
ValueTable read_value_table(const std::string& path);

// Deterministic self-contained SVG: fixed 800x500 canvas, axis ticks from
// the data range, up to 3 polyline series. Non-finite samples break the
// polyline rather than plot.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<ExtendedValue> y;
};
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series);

}  // namespace ratelab
