#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ratelab/extended_value.hpp"

namespace ratelab {

// How a space's open/closed sets are realized. Box-sampled spaces use
// one-cell morphological erosion/dilation as grid stand-ins for interior
// and closure; genuinely discrete spaces leave every set clopen.
enum class GridTopology { box_morphology, discrete };

// Declared regularity of the continuum function a GridFunction samples.
// On a finite grid every function is trivially continuous, so semicontinuity
// here is an explicit declaration of intent, not a computed property; the
// checks that distinguish lower from upper regular inputs trust this tag.
enum class Regularity { continuous, lower_semicontinuous, upper_semicontinuous, measurable };

// Compact axis-aligned box sampled on a regular lattice. Immutable; cheap
// to copy. Flat indices enumerate lattice points with the last axis fastest.
class GridSpace {
 public:
  GridSpace(std::vector<double> lower, std::vector<double> upper,
            std::vector<int> points_per_axis,
            GridTopology topology = GridTopology::box_morphology);

  // 1-d box [lo, hi] with n points.
  static GridSpace line(double lo, double hi, int n);
  // n unit-spaced points carrying the discrete topology.
  static GridSpace discrete_line(int n);

  int dim() const { return dim_; }
  std::size_t size() const { return total_; }
  GridTopology topology() const { return topology_; }

  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  int points(int axis) const { return points_[axis]; }
  double step(int axis) const { return step_[axis]; }
  double max_step() const;
  // Half the diameter of the box along its widest axis.
  double half_width() const;

  std::size_t flat_index(const std::vector<int>& idx) const;
  std::vector<int> unflatten(std::size_t flat) const;
  double coord(std::size_t flat, int axis) const;
  std::vector<double> point(std::size_t flat) const;
  // Exact lattice membership; throws when pt is not (within 1e-9) a node.
  std::size_t index_of_point(const std::vector<double>& pt) const;

  bool operator==(const GridSpace& o) const;
  bool operator!=(const GridSpace& o) const { return !(*this == o); }

 private:
  int dim_;
  std::vector<double> lower_, upper_, step_;
  std::vector<int> points_;
  std::vector<std::size_t> stride_;
  std::size_t total_;
  GridTopology topology_;
};

// Subset of a grid's lattice points.
class PointSet {
 public:
  explicit PointSet(GridSpace space);
  static PointSet none(const GridSpace& s) { return PointSet(s); }
  static PointSet all(const GridSpace& s);
  static PointSet of(const GridSpace& s, const std::vector<std::size_t>& indices);
  static PointSet from_predicate(const GridSpace& s,
                                 const std::function<bool(const std::vector<double>&)>& pred);

  const GridSpace& space() const { return space_; }
  bool contains(std::size_t flat) const { return member_[flat] != 0; }
  void add(std::size_t flat) { member_[flat] = 1; }
  void remove(std::size_t flat) { member_[flat] = 0; }
  bool empty() const;
  std::size_t count() const;
  std::vector<std::size_t> indices() const;

  PointSet complement() const;
  PointSet unite(const PointSet& o) const;
  PointSet intersect(const PointSet& o) const;
  bool subset_of(const PointSet& o) const;
  bool operator==(const PointSet& o) const;

 private:
  GridSpace space_;
  std::vector<char> member_;
};

// One-cell morphological interior/closure. On discrete spaces both are the
// identity. On box spaces a point survives erosion iff all of its existing
// axis neighbours are members, and dilation adds every point with a member
// neighbour; the box itself is both open and closed under this realization.
PointSet interior(const PointSet& a);
PointSet closure(const PointSet& a);

// Lattice points within Euclidean distance `radius` of `center` (a lattice
// node; off-grid centers are rejected). Radius 0 gives the singleton.
PointSet lattice_ball(const GridSpace& space, const std::vector<double>& center, double radius);

// Function sampled on a grid with values in [-inf, +finite]; +inf never
// occurs in a GridFunction. `bounded_above` records the caller's intent for
// the continuum function (on the grid a finite max always exists).
class GridFunction {
 public:
  GridFunction(GridSpace space, std::vector<ExtendedValue> values,
               Regularity reg = Regularity::measurable, bool bounded_above = true);

  static GridFunction constant(const GridSpace& s, double c,
                               Regularity reg = Regularity::continuous);
  static GridFunction from_fn(const GridSpace& s,
                              const std::function<double(const std::vector<double>&)>& fn,
                              Regularity reg = Regularity::continuous);

  const GridSpace& space() const { return space_; }
  Regularity regularity() const { return reg_; }
  bool bounded_above() const { return bounded_above_; }
  ExtendedValue value(std::size_t flat) const { return values_[flat]; }
  const std::vector<ExtendedValue>& values() const { return values_; }

  // Largest finite value; empty when the function is identically -inf.
  std::optional<double> max_finite() const;
  std::vector<double> distinct_finite_values_desc() const;
  PointSet level_set_ge(double c) const;

 private:
  GridSpace space_;
  std::vector<ExtendedValue> values_;
  Regularity reg_;
  bool bounded_above_;
};

// f on A, -inf off A. The regularity tag drops to measurable unless the
// caller overrides it.
GridFunction mask(const GridFunction& f, const PointSet& a,
                  std::optional<Regularity> reg = std::nullopt);

GridFunction pointwise_max(const GridFunction& f, const GridFunction& g);
GridFunction pointwise_min(const GridFunction& f, const GridFunction& g);
GridFunction add_const(const GridFunction& f, double c);
GridFunction min_with_const(const GridFunction& f, double c);
// t * f for t > 0 (tags preserved).
GridFunction scale(double t, const GridFunction& f);
// lambda*f + (1-lambda)*g for lambda in [0,1], applying the 0*(-inf)=0 rule.
GridFunction affine_combo(double lambda, const GridFunction& f, const GridFunction& g);

double euclidean_distance(const GridSpace& s, std::size_t a, std::size_t b);

}  // namespace ratelab
