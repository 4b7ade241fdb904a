#include "ratelab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include "ratelab/numerics.hpp"

namespace ratelab {

Concentration::Concentration(std::string id, GridSpace space, Kind kind, SetEval eval)
    : id_(std::move(id)), space_(std::move(space)), kind_(kind), eval_(std::move(eval)) {
  if (!eval_) throw std::invalid_argument("Concentration: evaluator must be callable");
}

ExtendedValue Concentration::eval(const PointSet& a) const {
  if (a.space() != space_) throw std::invalid_argument("Concentration::eval: space mismatch");
  if (a.empty()) return ExtendedValue::neg_inf();
  ExtendedValue v = eval_(a);
  if (v.is_pos_inf()) throw std::logic_error("Concentration::eval: evaluator returned +inf");
  if (v.is_finite() && v.value() > 0.0) return ExtendedValue(0.0);  // range is [-inf, 0]
  return v;
}

Concentration maxplus_concentration(std::string id, const GridFunction& j) {
  double max_finite = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < j.space().size(); ++i) {
    const ExtendedValue v = j.value(i);
    if (v.is_finite()) {
      if (v.value() > 1e-12) {
        throw std::invalid_argument("maxplus_concentration: density must stay <= 0");
      }
      max_finite = std::max(max_finite, v.value());
    }
  }
  if (!(std::abs(max_finite) <= 1e-12)) {
    throw std::invalid_argument("maxplus_concentration: density must attain 0 somewhere");
  }
  GridFunction density = j;
  return Concentration(
      std::move(id), j.space(), Concentration::Kind::maxplus_density,
      [density](const PointSet& a) {
        ExtendedValue best = ExtendedValue::neg_inf();
        for (std::size_t flat : a.indices()) best = vmax(best, density.value(flat));
        return best;
      });
}

Concentration capacity_limit_concentration(const EntropyModel& model, CapacityMode mode) {
  if (!model.has_capacity()) {
    throw std::invalid_argument("capacity_limit_concentration: model lacks capacity support");
  }
  const std::vector<int> ladder = model.n_ladder();
  const std::size_t window = static_cast<std::size_t>(model.tail_window());
  const std::size_t first = ladder.size() > window ? ladder.size() - window : 0;
  EntropyModel snapshot = model;
  const char* name = mode == CapacityMode::upper ? "capacity-limit-upper" : "capacity-limit-lower";
  return Concentration(
      std::string(name) + ":" + model.id(), model.space(),
      Concentration::Kind::capacity_limit,
      [snapshot, ladder, first, mode](const PointSet& a) {
        bool any = false;
        double acc = 0.0;
        for (std::size_t k = first; k < ladder.size(); ++k) {
          const int n = ladder[k];
          const double v = snapshot.log_capacity(a, n) / n;
          if (std::isinf(v) && v < 0) {
            if (mode == CapacityMode::lower) return ExtendedValue::neg_inf();
            continue;  // a -inf entry never carries the window max
          }
          if (!any) {
            acc = v;
            any = true;
          } else {
            acc = mode == CapacityMode::upper ? std::max(acc, v) : std::min(acc, v);
          }
        }
        if (!any) return ExtendedValue::neg_inf();
        return ExtendedValue(acc);
      });
}

namespace {

PointSet random_closed_set(const GridSpace& space, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, space.size() - 1);
  std::uniform_int_distribution<int> ball_count(1, 3);
  std::uniform_int_distribution<int> radius_steps(0, 6);
  PointSet c = PointSet::none(space);
  const int balls = ball_count(rng);
  for (int b = 0; b < balls; ++b) {
    const std::vector<double> center = space.point(pick(rng));
    const double r = radius_steps(rng) * space.max_step();
    c = c.unite(lattice_ball(space, center, r));
  }
  return closure(c);
}

double ball_radius_covering(const GridSpace& space, const std::vector<std::size_t>& members,
                            std::size_t center_flat) {
  double worst = 0.0;
  for (std::size_t flat : members) {
    worst = std::max(worst, euclidean_distance(space, flat, center_flat));
  }
  return worst * (1.0 + 1e-9);
}

}  // namespace

CheckReport check_weak_maxitivity(const Concentration& j, int trials, unsigned long long seed,
                                  double tol) {
  if (trials < 1) throw std::invalid_argument("check_weak_maxitivity: trials must be >= 1");
  const GridSpace& space = j.space();
  std::mt19937_64 rng(seed);

  CheckReport report;
  report.check = "weak-maxitivity";
  report.pass = true;
  report.worst_violation = 0.0;

  for (int trial = 0; trial < trials; ++trial) {
    const PointSet c = random_closed_set(space, rng);
    if (c.empty()) continue;
    const std::vector<std::size_t> members = c.indices();

    std::vector<PointSet> cover;
    const int strategy = trial % 3;
    if (strategy == 0 && members.size() <= 64) {
      for (std::size_t flat : members) {
        cover.push_back(lattice_ball(space, space.point(flat), 0.0));
      }
    } else if (strategy == 1 && members.size() >= 2) {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      const std::size_t c1 = members[pick(rng)];
      const std::size_t c2 = members[pick(rng)];
      std::vector<std::size_t> near1, near2;
      for (std::size_t flat : members) {
        if (euclidean_distance(space, flat, c1) <= euclidean_distance(space, flat, c2)) {
          near1.push_back(flat);
        } else {
          near2.push_back(flat);
        }
      }
      if (!near1.empty()) {
        cover.push_back(lattice_ball(space, space.point(c1), ball_radius_covering(space, near1, c1)));
      }
      if (!near2.empty()) {
        cover.push_back(lattice_ball(space, space.point(c2), ball_radius_covering(space, near2, c2)));
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      const std::size_t c1 = members[pick(rng)];
      cover.push_back(lattice_ball(space, space.point(c1), ball_radius_covering(space, members, c1)));
    }
    if (cover.empty()) continue;

    PointSet covered = PointSet::none(space);
    for (const PointSet& o : cover) covered = covered.unite(o);
    if (!c.subset_of(covered)) throw std::logic_error("check_weak_maxitivity: cover misses C");

    const ExtendedValue jc = j.eval(c);
    ExtendedValue best = ExtendedValue::neg_inf();
    for (const PointSet& o : cover) best = vmax(best, j.eval(o));

    double violation = 0.0;
    if (jc.is_neg_inf()) {
      violation = 0.0;
    } else if (best.is_neg_inf()) {
      violation = std::numeric_limits<double>::infinity();
    } else {
      violation = std::max(0.0, jc.value() - best.value());
    }
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.witness = json{{"trial", trial},
                            {"strategy", strategy},
                            {"set_size", members.size()},
                            {"cover_size", cover.size()},
                            {"j_closed", json_number(jc)},
                            {"max_j_cover", json_number(best)}};
    }
  }
  report.pass = report.worst_violation <= tol;
  report.proxy = "sampled lattice-ball covers";
  report.details = json{{"trials", trials}, {"seed", seed}, {"tolerance", tol}};
  return report;
}

namespace {

// Sub-box keeping `margin` cells away from every face; empty when the
// margin eats the whole axis.
PointSet margin_box(const GridSpace& space, int margin) {
  PointSet k = PointSet::none(space);
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const std::vector<int> idx = space.unflatten(flat);
    bool inside = true;
    for (int axis = 0; axis < space.dim(); ++axis) {
      if (idx[axis] < margin || idx[axis] > space.points(axis) - 1 - margin) {
        inside = false;
        break;
      }
    }
    if (inside) k.add(flat);
  }
  return k;
}

}  // namespace

CheckReport check_tightness(const Concentration& j, const std::vector<double>& levels) {
  if (levels.empty()) throw std::invalid_argument("check_tightness: levels must be nonempty");
  const GridSpace& space = j.space();

  int max_margin = std::numeric_limits<int>::max();
  for (int axis = 0; axis < space.dim(); ++axis) {
    max_margin = std::min(max_margin, (space.points(axis) - 1) / 2);
  }

  CheckReport report;
  report.check = "exponential-tightness";
  report.pass = true;
  report.worst_violation = 0.0;
  json per_level = json::array();

  for (double level : levels) {
    if (!(level > 0)) throw std::invalid_argument("check_tightness: levels must be positive");
    int best = 0;  // largest margin whose complement stays below -level
    ExtendedValue best_j = ExtendedValue::pos_inf();
    ExtendedValue loosest = ExtendedValue::pos_inf();  // value at margin 1
    for (int m = 1; m <= max_margin; ++m) {
      const PointSet k = margin_box(space, m);
      if (k.empty()) break;
      const ExtendedValue jkc = j.eval(k.complement());
      if (m == 1) loosest = jkc;
      const bool ok = jkc.is_neg_inf() || (jkc.is_finite() && jkc.value() <= -level);
      if (!ok) break;
      best = m;
      best_j = jkc;
    }

    json record;
    record["level"] = level;
    if (best >= 1) {
      std::vector<double> lo(space.dim()), hi(space.dim());
      for (int axis = 0; axis < space.dim(); ++axis) {
        lo[axis] = space.lower(axis) + best * space.step(axis);
        hi[axis] = space.upper(axis) - best * space.step(axis);
      }
      record["pass"] = true;
      record["margin_cells"] = best;
      record["box_lower"] = lo;
      record["box_upper"] = hi;
      record["j_complement"] = json_number(best_j);
      // slack <= 0 documents how comfortably the level was met
      record["slack"] = json_number(best_j.is_finite() ? ExtendedValue(best_j.value() + level)
                                                       : best_j);
    } else {
      record["pass"] = false;
      record["j_complement_at_margin_1"] = json_number(loosest);
      report.pass = false;
      if (loosest.is_finite()) {
        report.worst_violation = std::max(report.worst_violation, loosest.value() + level);
      }
    }
    per_level.push_back(record);
  }

  report.details = json{{"levels", per_level}};
  report.proxy = "proper sub-boxes only";
  return report;
}

}  // namespace ratelab
