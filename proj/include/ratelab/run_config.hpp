#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"

namespace ratelab {

// Everything a batch run needs; a run is reproducible from this struct
// alone, and every output file embeds its echo (the provenance block).
struct RunConfig {
  std::string model_id = "laplace";
  std::string family_spec;    // empty -> command-specific default
  std::string function_spec;  // single function, e.g. const:3 | linear:0.5 | invv:1

  std::optional<double> box_lower;
  std::optional<double> box_upper;
  std::optional<int> box_points;

  std::vector<int> n_ladder = {4, 8, 16, 32, 64, 128, 256};
  int tail_window = 3;

  double tol_asymptotic = 1e-2;
  double tol_exact = 1e-8;
  double margin = 1e-4;
  double radius = 0.0;  // 0 -> 2 grid steps

  std::string out_dir = "out";
  unsigned long long seed = 12345;

  json provenance() const;
};

// The model's default box unless all three overrides are present.
GridSpace make_space(const RunConfig& config);

// const:<c> | linear:<y> | invv:<a>; throws std::invalid_argument on
// malformed specs.
GridFunction parse_function_spec(const std::string& spec, const GridSpace& space);

}  // namespace ratelab
