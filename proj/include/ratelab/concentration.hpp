#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ratelab/entropy.hpp"
#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"

namespace ratelab {

// A set function J with values in [-inf, 0]: J(empty) = -inf, monotone in
// set inclusion, and J of the whole space equals 0 for the max-plus kind.
class Concentration {
 public:
  enum class Kind { maxplus_density, capacity_limit, derived_from_entropy, custom };

  using SetEval = std::function<ExtendedValue(const PointSet&)>;

  Concentration(std::string id, GridSpace space, Kind kind, SetEval eval);

  const std::string& id() const { return id_; }
  const GridSpace& space() const { return space_; }
  Kind kind() const { return kind_; }

  // J(A). Empty sets short-circuit to -inf; finite values are clamped to
  // <= 0 (snapping tiny positive numerical residue back to zero).
  ExtendedValue eval(const PointSet& a) const;

 private:
  std::string id_;
  GridSpace space_;
  Kind kind_;
  SetEval eval_;
};

// J(A) = max_{x in A} j(x) for a pointwise max-plus density j <= 0 attaining
// 0 somewhere. Throws std::invalid_argument if j has a positive entry or
// never reaches 0 (1e-12 slack).
Concentration maxplus_concentration(std::string id, const GridFunction& j);

// Which one-sided capacity limit to take along the tail window:
// upper -> window max of (1/n) log capacity, lower -> window min.
enum class CapacityMode { lower, upper };

// J(A) = tail-window max (or min) over the model ladder of
// (1/n) log capacity_n(A). Requires the model to expose capacities.
Concentration capacity_limit_concentration(const EntropyModel& model, CapacityMode mode);

// Randomized audit of the covering inequality J(C) <= max_i J(O_i):
// seeded closed sets C (unions of lattice balls) are paired with finite
// covers built from raw lattice balls -- per-point singleton balls, two
// balls split around the sampled centers, or one ball around the whole
// set.  Raw (undilated) balls are deliberate: a cover of two singletons
// over a two-point set must expose a genuinely non-weakly-maxitive J.
CheckReport check_weak_maxitivity(const Concentration& j, int trials, unsigned long long seed,
                                  double tol);

// Exponential tightness proxy: for each level L in `levels`, scan proper
// sub-boxes K (never the whole space) from large to small and report the
// smallest K with J(K complement) <= -L, or fail the level if none works.
CheckReport check_tightness(const Concentration& j, const std::vector<double>& levels);

}  // namespace ratelab
