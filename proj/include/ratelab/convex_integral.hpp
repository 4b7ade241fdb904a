#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ratelab/concentration.hpp"
#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"

namespace ratelab {

// A candidate rate function: pointwise values in [0, +inf], tagged with how
// it was produced.
class RateField {
 public:
  enum class Provenance { minimal, conjugate, analytic };

  RateField(GridSpace space, std::vector<ExtendedValue> values, Provenance provenance);

  static RateField from_fn(const GridSpace& space,
                           const std::function<ExtendedValue(const std::vector<double>&)>& fn,
                           Provenance provenance);

  const GridSpace& space() const { return space_; }
  Provenance provenance() const { return provenance_; }
  ExtendedValue value(std::size_t flat) const { return values_[flat]; }
  const std::vector<ExtendedValue>& values() const { return values_; }

  // inf over A of the rate; empty set -> +inf.
  ExtendedValue inf_over(const PointSet& a) const;
  ExtendedValue min_value() const;

 private:
  GridSpace space_;
  std::vector<ExtendedValue> values_;
  Provenance provenance_;
};

// sup_c { c + J({f >= c}) } with c running over the distinct finite values
// of f. On a finite grid the sup is attained at a breakpoint, so the scan is
// exact for the given J.
ExtendedValue convex_integral(const GridFunction& f, const Concentration& j);

// sup_x { f(x) - i(x) } with the masking convention that -inf beats any
// arithmetic (points where f is -inf or i is +inf drop out).
ExtendedValue sup_f_minus_rate(const GridFunction& f, const RateField& i);

// Radii for minimal_rate: geometric halving from the half-width of the box
// down to one grid step, then the step itself, then 0.
std::vector<double> default_radius_ladder(const GridSpace& space);

// I_min(x) = -inf_r J(ball(x, r)) realized as a rolling max of -J over a
// decreasing radius ladder.
RateField minimal_rate(const Concentration& j, const std::vector<double>& radius_ladder);
RateField minimal_rate(const Concentration& j);

// Audit of the equivalence between set bounds and function bounds:
//   lower: J(A) >= -inf_{A open} I  <=>  phi_J(f) >= sup(f - I) for f lsc/continuous
//   upper: J(C) <= -inf_{C closed} I <=>  phi_J(f) <= sup(f - I) for f usc-tagged
// Exhaustive over all sets when the space is discrete with <= 12 points;
// otherwise a seeded battery of random dyadic functions and ball-derived
// sets, with directed candidates mask(max f, A) replayed from any failing
// set so the two sides of each equivalence are reported consistently.
CheckReport check_duality_bounds(const Concentration& j, const RateField& i, int trials,
                                 unsigned long long seed, double tol);

// Structural properties of f -> phi_J(f):
//   b1 mask identity (phi_J of the 0/-inf indicator of A equals J(A)),
//   b2 zero (phi_J(0) = 0), b3 translation (phi_J(f + c) = phi_J(f) + c,
//   exact), b4 monotone (f <= g implies phi_J(f) <= phi_J(g)),
//   b5 truncation limits (phi_J(min(f, M)) and phi_J(max(f, -M)) reach
//   phi_J(f) exactly once M clears the finite range), b6 maxitivity
//   (phi_J(max(f,g)) <= max of integrals), b7 convexity in lambda on
//   {0, 1/4, 1/2, 3/4, 1}. b6/b7 run only for max-plus concentrations.
CheckReport check_integral_properties(const Concentration& j, int trials,
                                      unsigned long long seed, double tol);

}  // namespace ratelab
