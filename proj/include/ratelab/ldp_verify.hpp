#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ratelab/concentration.hpp"
#include "ratelab/convex_integral.hpp"
#include "ratelab/entropy.hpp"
#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"
#include "ratelab/testing_family.hpp"

namespace ratelab {

struct NamedSet {
  std::string descriptor;
  PointSet set;
};

struct NamedFunction {
  std::string id;
  GridFunction fn;
};

// One sandwich record: -inf over grid-interior of the rate <= J_lower,
// J_upper <= -inf over grid-closure of the rate, J_lower <= J_upper.
struct SetRecord {
  std::string descriptor;
  ExtendedValue lower_bound{0.0};  // -inf over interior of rate
  ExtendedValue j_lower{0.0};
  ExtendedValue j_upper{0.0};
  ExtendedValue upper_bound{0.0};  // -inf over closure of rate
  bool pass = false;
  json to_json() const;
};

// One variational record: entropy_lower ~ entropy_upper ~ sup(f - rate).
struct FunctionRecord {
  std::string id;
  ExtendedValue entropy_lower{0.0};
  ExtendedValue entropy_upper{0.0};
  ExtendedValue sup_gap{0.0};  // sup over grid of f - rate
  bool pass = false;
  bool skipped = false;  // growth precondition unmet: reported, not failed
  json to_json() const;
};

struct LdpReport {
  bool ldp_pass = true;
  bool lp_pass = true;
  double tolerance = 0.0;
  bool full_certified = false;  // pipeline only: all stages passed
  std::vector<std::string> notes;
  std::vector<SetRecord> sets;
  std::vector<FunctionRecord> functions;
  json provenance;  // {n_ladder, tail_window, grid}

  // {summary:{ldp_pass, lp_pass, tolerance, ...}, sets:[...],
  //  functions:[...], provenance:{...}}
  json to_json() const;
};

json grid_provenance(const EntropyModel& model);

// Sandwich bounds for every set A: grid interior/closure via one-cell
// erosion/dilation, J bounds via lower/upper capacity-limit concentrations.
LdpReport verify_ldp(const EntropyModel& model, const RateField& rate,
                     const std::vector<NamedSet>& sets, double tol);

// Variational identity for every function: window entropies against
// sup(f - rate). Functions failing the growth precondition are marked
// skipped rather than failed.
LdpReport verify_lp(const EntropyModel& model, const RateField& rate,
                    const std::vector<NamedFunction>& functions, double tol);

struct PipelineConfig {
  double tol = 2e-2;
  double margin = 1e-4;
  double radius = 0.0;  // 0 -> 2 grid steps
  std::vector<double> tightness_levels = {0.5, 1.0, 2.0};
  std::vector<double> richness_radii;  // empty -> {2*step, 4*step, 8*step}
  bool finite_dim_checks = false;      // report the auxiliary sub-checks (a)-(c)
  std::optional<std::vector<NamedSet>> sets;            // default battery if absent
  std::optional<std::vector<NamedFunction>> functions;  // default battery if absent
};

// Tightness -> conjugate -> exposed -> richness; on full success runs
// verify_ldp + verify_lp with the conjugate rate and checks that the
// minimal rates of both capacity-limit concentrations agree with the
// conjugate at every nice exposed point. A failed richness stage
// downgrades to one-sided bounds (upper on all sets, lower only through
// exposed points) and leaves the full LDP uncertified.
LdpReport gartner_ellis_pipeline(const EntropyModel& model, const TestingFamily& h,
                                 const PipelineConfig& config);

// Meta-check: a passing verify_ldp forces a passing verify_lp on the given
// batteries. A failed implication indicates an implementation bug, and the
// report says so.
CheckReport check_ldp_implies_lp(const EntropyModel& model, const RateField& rate,
                                 const std::vector<NamedSet>& sets,
                                 const std::vector<NamedFunction>& functions, double tol);

// Intervals/boxes with endpoints on a coarse sub-lattice (about 10 per
// axis) plus complements of lattice balls.
std::vector<NamedSet> default_set_battery(const GridSpace& space);

// Linear and inverted-v members plus seeded random piecewise-linear
// functions (kinks on a coarse sub-lattice, values rounded to 1/64).
std::vector<NamedFunction> default_function_battery(const GridSpace& space,
                                                    unsigned long long seed,
                                                    int random_count);

}  // namespace ratelab
