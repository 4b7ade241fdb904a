#include "ratelab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ratelab {

GridSpace::GridSpace(std::vector<double> lower, std::vector<double> upper,
                     std::vector<int> points_per_axis, GridTopology topology)
    : dim_(static_cast<int>(lower.size())),
      lower_(std::move(lower)),
      upper_(std::move(upper)),
      points_(std::move(points_per_axis)),
      topology_(topology) {
  if (dim_ == 0) throw std::invalid_argument("GridSpace: zero dimensions");
  if (upper_.size() != static_cast<std::size_t>(dim_) ||
      points_.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("GridSpace: axis vectors disagree in length");
  step_.resize(dim_);
  total_ = 1;
  for (int k = 0; k < dim_; ++k) {
    if (!(lower_[k] < upper_[k]))
      throw std::invalid_argument("GridSpace: lower must be < upper on every axis");
    if (points_[k] < 2)
      throw std::invalid_argument("GridSpace: need at least 2 points per axis");
    step_[k] = (upper_[k] - lower_[k]) / (points_[k] - 1);
    total_ *= static_cast<std::size_t>(points_[k]);
  }
  stride_.assign(dim_, 1);
  for (int k = dim_ - 2; k >= 0; --k)
    stride_[k] = stride_[k + 1] * static_cast<std::size_t>(points_[k + 1]);
}

GridSpace GridSpace::line(double lo, double hi, int n) {
  return GridSpace({lo}, {hi}, {n}, GridTopology::box_morphology);
}

GridSpace GridSpace::discrete_line(int n) {
  return GridSpace({0.0}, {static_cast<double>(n - 1)}, {n}, GridTopology::discrete);
}

double GridSpace::max_step() const { return *std::max_element(step_.begin(), step_.end()); }

double GridSpace::half_width() const {
  double w = 0.0;
  for (int k = 0; k < dim_; ++k) w = std::max(w, (upper_[k] - lower_[k]) / 2.0);
  return w;
}

std::size_t GridSpace::flat_index(const std::vector<int>& idx) const {
  if (idx.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("GridSpace: index arity mismatch");
  std::size_t flat = 0;
  for (int k = 0; k < dim_; ++k) {
    if (idx[k] < 0 || idx[k] >= points_[k]) throw std::out_of_range("GridSpace: index out of range");
    flat += stride_[k] * static_cast<std::size_t>(idx[k]);
  }
  return flat;
}

std::vector<int> GridSpace::unflatten(std::size_t flat) const {
  if (flat >= total_) throw std::out_of_range("GridSpace: flat index out of range");
  std::vector<int> idx(dim_);
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<int>((flat / stride_[k]) % static_cast<std::size_t>(points_[k]));
  }
  return idx;
}

double GridSpace::coord(std::size_t flat, int axis) const {
  const int i = static_cast<int>((flat / stride_[axis]) % static_cast<std::size_t>(points_[axis]));
  return lower_[axis] + i * step_[axis];
}

std::vector<double> GridSpace::point(std::size_t flat) const {
  std::vector<double> p(dim_);
  for (int k = 0; k < dim_; ++k) p[k] = coord(flat, k);
  return p;
}

std::size_t GridSpace::index_of_point(const std::vector<double>& pt) const {
  if (pt.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("GridSpace: point arity mismatch");
  std::vector<int> idx(dim_);
  for (int k = 0; k < dim_; ++k) {
    const double rel = (pt[k] - lower_[k]) / step_[k];
    const int i = static_cast<int>(std::lround(rel));
    if (i < 0 || i >= points_[k])
      throw std::invalid_argument("GridSpace: point outside the box");
    const double node = lower_[k] + i * step_[k];
    const double tol = 1e-9 * std::max(1.0, std::fabs(node));
    if (std::fabs(pt[k] - node) > tol)
      throw std::invalid_argument("GridSpace: point is not a lattice node");
    idx[k] = i;
  }
  return flat_index(idx);
}

bool GridSpace::operator==(const GridSpace& o) const {
  return dim_ == o.dim_ && lower_ == o.lower_ && upper_ == o.upper_ && points_ == o.points_ &&
         topology_ == o.topology_;
}

PointSet::PointSet(GridSpace space) : space_(std::move(space)), member_(space_.size(), 0) {}

PointSet PointSet::all(const GridSpace& s) {
  PointSet p(s);
  std::fill(p.member_.begin(), p.member_.end(), 1);
  return p;
}

PointSet PointSet::of(const GridSpace& s, const std::vector<std::size_t>& indices) {
  PointSet p(s);
  for (std::size_t i : indices) {
    if (i >= s.size()) throw std::out_of_range("PointSet: index out of range");
    p.member_[i] = 1;
  }
  return p;
}

PointSet PointSet::from_predicate(const GridSpace& s,
                                  const std::function<bool(const std::vector<double>&)>& pred) {
  PointSet p(s);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (pred(s.point(i))) p.member_[i] = 1;
  return p;
}

bool PointSet::empty() const {
  return std::none_of(member_.begin(), member_.end(), [](char c) { return c != 0; });
}

std::size_t PointSet::count() const {
  return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), 1));
}

std::vector<std::size_t> PointSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < member_.size(); ++i)
    if (member_[i]) out.push_back(i);
  return out;
}

PointSet PointSet::complement() const {
  PointSet p(space_);
  for (std::size_t i = 0; i < member_.size(); ++i) p.member_[i] = member_[i] ? 0 : 1;
  return p;
}

PointSet PointSet::unite(const PointSet& o) const {
  if (space_ != o.space_) throw std::invalid_argument("PointSet: space mismatch");
  PointSet p(space_);
  for (std::size_t i = 0; i < member_.size(); ++i) p.member_[i] = (member_[i] | o.member_[i]);
  return p;
}

PointSet PointSet::intersect(const PointSet& o) const {
  if (space_ != o.space_) throw std::invalid_argument("PointSet: space mismatch");
  PointSet p(space_);
  for (std::size_t i = 0; i < member_.size(); ++i) p.member_[i] = (member_[i] & o.member_[i]);
  return p;
}

bool PointSet::subset_of(const PointSet& o) const {
  if (space_ != o.space_) throw std::invalid_argument("PointSet: space mismatch");
  for (std::size_t i = 0; i < member_.size(); ++i)
    if (member_[i] && !o.member_[i]) return false;
  return true;
}

bool PointSet::operator==(const PointSet& o) const {
  return space_ == o.space_ && member_ == o.member_;
}

namespace {

// Applies fn to every existing axis neighbour (+-1 along each axis) of flat.
template <typename Fn>
void for_each_neighbour(const GridSpace& s, std::size_t flat, Fn&& fn) {
  const std::vector<int> idx = s.unflatten(flat);
  std::vector<int> nb = idx;
  for (int k = 0; k < s.dim(); ++k) {
    for (int d : {-1, 1}) {
      const int j = idx[k] + d;
      if (j < 0 || j >= s.points(k)) continue;
      nb[k] = j;
      fn(s.flat_index(nb));
    }
    nb[k] = idx[k];
  }
}

}  // namespace

PointSet interior(const PointSet& a) {
  const GridSpace& s = a.space();
  if (s.topology() == GridTopology::discrete) return a;
  PointSet out(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!a.contains(i)) continue;
    bool keep = true;
    for_each_neighbour(s, i, [&](std::size_t nb) { keep = keep && a.contains(nb); });
    if (keep) out.add(i);
  }
  return out;
}

PointSet closure(const PointSet& a) {
  const GridSpace& s = a.space();
  if (s.topology() == GridTopology::discrete) return a;
  PointSet out(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (a.contains(i)) {
      out.add(i);
      continue;
    }
    bool touch = false;
    for_each_neighbour(s, i, [&](std::size_t nb) { touch = touch || a.contains(nb); });
    if (touch) out.add(i);
  }
  return out;
}

PointSet lattice_ball(const GridSpace& space, const std::vector<double>& center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("lattice_ball: negative radius");
  const std::size_t cflat = space.index_of_point(center);  // rejects off-grid centers
  const std::vector<int> cidx = space.unflatten(cflat);
  // Index window per axis, then exact Euclidean filter.
  std::vector<int> lo(space.dim()), hi(space.dim());
  for (int k = 0; k < space.dim(); ++k) {
    const int span = static_cast<int>(std::floor(radius / space.step(k) + 1e-12));
    lo[k] = std::max(0, cidx[k] - span);
    hi[k] = std::min(space.points(k) - 1, cidx[k] + span);
  }
  PointSet out(space);
  std::vector<int> cur = lo;
  while (true) {
    double d2 = 0.0;
    for (int k = 0; k < space.dim(); ++k) {
      const double dx = (cur[k] - cidx[k]) * space.step(k);
      d2 += dx * dx;
    }
    if (d2 <= radius * radius * (1.0 + 1e-12) + 1e-300) out.add(space.flat_index(cur));
    int k = space.dim() - 1;
    while (k >= 0) {
      if (++cur[k] <= hi[k]) break;
      cur[k] = lo[k];
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

GridFunction::GridFunction(GridSpace space, std::vector<ExtendedValue> values, Regularity reg,
                           bool bounded_above)
    : space_(std::move(space)), values_(std::move(values)), reg_(reg), bounded_above_(bounded_above) {
  if (values_.size() != space_.size())
    throw std::invalid_argument("GridFunction: value count does not match the grid");
  for (const ExtendedValue& v : values_)
    if (v.is_pos_inf()) throw std::invalid_argument("GridFunction: +inf value not allowed");
}

GridFunction GridFunction::constant(const GridSpace& s, double c, Regularity reg) {
  return GridFunction(s, std::vector<ExtendedValue>(s.size(), ExtendedValue(c)), reg);
}

GridFunction GridFunction::from_fn(const GridSpace& s,
                                   const std::function<double(const std::vector<double>&)>& fn,
                                   Regularity reg) {
  std::vector<ExtendedValue> vals;
  vals.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) vals.emplace_back(fn(s.point(i)));
  return GridFunction(s, std::move(vals), reg);
}

std::optional<double> GridFunction::max_finite() const {
  std::optional<double> m;
  for (const ExtendedValue& v : values_)
    if (v.is_finite() && (!m || v.value() > *m)) m = v.value();
  return m;
}

std::vector<double> GridFunction::distinct_finite_values_desc() const {
  std::vector<double> vals;
  for (const ExtendedValue& v : values_)
    if (v.is_finite()) vals.push_back(v.value());
  std::sort(vals.begin(), vals.end(), std::greater<>());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

PointSet GridFunction::level_set_ge(double c) const {
  PointSet p(space_);
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i].is_finite() && values_[i].value() >= c) p.add(i);
  return p;
}

GridFunction mask(const GridFunction& f, const PointSet& a, std::optional<Regularity> reg) {
  if (f.space() != a.space()) throw std::invalid_argument("mask: space mismatch");
  std::vector<ExtendedValue> vals;
  vals.reserve(f.space().size());
  for (std::size_t i = 0; i < f.space().size(); ++i)
    vals.push_back(a.contains(i) ? f.value(i) : ExtendedValue::neg_inf());
  return GridFunction(f.space(), std::move(vals), reg.value_or(Regularity::measurable),
                      f.bounded_above());
}

namespace {
GridFunction zip(const GridFunction& f, const GridFunction& g,
                 ExtendedValue (*op)(ExtendedValue, ExtendedValue)) {
  if (f.space() != g.space()) throw std::invalid_argument("grid op: space mismatch");
  std::vector<ExtendedValue> vals;
  vals.reserve(f.space().size());
  for (std::size_t i = 0; i < f.space().size(); ++i) vals.push_back(op(f.value(i), g.value(i)));
  const Regularity reg = f.regularity() == g.regularity() ? f.regularity() : Regularity::measurable;
  return GridFunction(f.space(), std::move(vals), reg);
}
}  // namespace

GridFunction pointwise_max(const GridFunction& f, const GridFunction& g) {
  return zip(f, g, +[](ExtendedValue a, ExtendedValue b) { return vmax(a, b); });
}

GridFunction pointwise_min(const GridFunction& f, const GridFunction& g) {
  return zip(f, g, +[](ExtendedValue a, ExtendedValue b) { return vmin(a, b); });
}

GridFunction add_const(const GridFunction& f, double c) {
  std::vector<ExtendedValue> vals;
  vals.reserve(f.space().size());
  for (const ExtendedValue& v : f.values()) vals.push_back(v + ExtendedValue(c));
  return GridFunction(f.space(), std::move(vals), f.regularity(), f.bounded_above());
}

GridFunction min_with_const(const GridFunction& f, double c) {
  std::vector<ExtendedValue> vals;
  vals.reserve(f.space().size());
  for (const ExtendedValue& v : f.values()) vals.push_back(vmin(v, ExtendedValue(c)));
  return GridFunction(f.space(), std::move(vals), f.regularity(), true);
}

GridFunction scale(double t, const GridFunction& f) {
  if (!(t > 0.0)) throw std::invalid_argument("scale: factor must be positive");
  std::vector<ExtendedValue> vals;
  vals.reserve(f.space().size());
  for (const ExtendedValue& v : f.values()) vals.push_back(scaled(t, v));
  return GridFunction(f.space(), std::move(vals), f.regularity(), f.bounded_above());
}

GridFunction affine_combo(double lambda, const GridFunction& f, const GridFunction& g) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("affine_combo: lambda outside [0,1]");
  if (f.space() != g.space()) throw std::invalid_argument("affine_combo: space mismatch");
  std::vector<ExtendedValue> vals;
  vals.reserve(f.space().size());
  for (std::size_t i = 0; i < f.space().size(); ++i)
    vals.push_back(scaled(lambda, f.value(i)) + scaled(1.0 - lambda, g.value(i)));
  return GridFunction(f.space(), std::move(vals), Regularity::measurable);
}

double euclidean_distance(const GridSpace& s, std::size_t a, std::size_t b) {
  double d2 = 0.0;
  for (int k = 0; k < s.dim(); ++k) {
    const double dx = s.coord(a, k) - s.coord(b, k);
    d2 += dx * dx;
  }
  return std::sqrt(d2);
}

}  // namespace ratelab
