#include "ratelab/convex_integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

namespace ratelab {

RateField::RateField(GridSpace space, std::vector<ExtendedValue> values, Provenance provenance)
    : space_(std::move(space)), values_(std::move(values)), provenance_(provenance) {
  if (values_.size() != space_.size()) {
    throw std::invalid_argument("RateField: value count must match grid size");
  }
  for (ExtendedValue& v : values_) {
    if (v.is_neg_inf()) throw std::invalid_argument("RateField: -inf is not a rate value");
    if (v.is_finite() && v.value() < 0.0) {
      if (v.value() < -1e-9) {
        throw std::invalid_argument("RateField: negative rate value");
      }
      v = ExtendedValue(0.0);  // floating-point dust below zero
    }
  }
}

RateField RateField::from_fn(const GridSpace& space,
                             const std::function<ExtendedValue(const std::vector<double>&)>& fn,
                             Provenance provenance) {
  std::vector<ExtendedValue> values;
  values.reserve(space.size());
  for (std::size_t flat = 0; flat < space.size(); ++flat) values.push_back(fn(space.point(flat)));
  return RateField(space, std::move(values), provenance);
}

ExtendedValue RateField::inf_over(const PointSet& a) const {
  if (a.space() != space_) throw std::invalid_argument("RateField::inf_over: space mismatch");
  ExtendedValue best = ExtendedValue::pos_inf();
  for (std::size_t flat = 0; flat < space_.size(); ++flat) {
    if (a.contains(flat)) best = vmin(best, values_[flat]);
  }
  return best;
}

ExtendedValue RateField::min_value() const {
  ExtendedValue best = ExtendedValue::pos_inf();
  for (const ExtendedValue& v : values_) best = vmin(best, v);
  return best;
}

ExtendedValue convex_integral(const GridFunction& f, const Concentration& j) {
  if (f.space() != j.space()) throw std::invalid_argument("convex_integral: space mismatch");
  const std::vector<double> levels = f.distinct_finite_values_desc();
  if (levels.empty()) return ExtendedValue::neg_inf();

  // The sup over c of {c + J({f >= c})} is attained at a value of f: between
  // consecutive values the level set is constant while c decreases.
  ExtendedValue best = ExtendedValue::neg_inf();
  PointSet level = PointSet::none(f.space());
  std::size_t cursor = 0;
  std::vector<std::pair<double, std::size_t>> order;  // value desc -> flat
  order.reserve(f.space().size());
  for (std::size_t flat = 0; flat < f.space().size(); ++flat) {
    if (f.value(flat).is_finite()) order.emplace_back(f.value(flat).value(), flat);
  }
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  for (double c : levels) {
    while (cursor < order.size() && order[cursor].first >= c) {
      level.add(order[cursor].second);
      ++cursor;
    }
    best = vmax(best, ExtendedValue(c) + j.eval(level));
  }
  return best;
}

ExtendedValue sup_f_minus_rate(const GridFunction& f, const RateField& i) {
  if (f.space() != i.space()) throw std::invalid_argument("sup_f_minus_rate: space mismatch");
  ExtendedValue best = ExtendedValue::neg_inf();
  for (std::size_t flat = 0; flat < f.space().size(); ++flat) {
    const ExtendedValue fv = f.value(flat);
    const ExtendedValue iv = i.value(flat);
    if (fv.is_neg_inf() || iv.is_pos_inf()) continue;  // f - I drops out
    best = vmax(best, fv - iv);
  }
  return best;
}

std::vector<double> default_radius_ladder(const GridSpace& space) {
  std::vector<double> radii;
  const double step = space.max_step();
  double r = space.half_width();
  while (r > step * (1.0 + 1e-12)) {
    radii.push_back(r);
    r *= 0.5;
  }
  radii.push_back(step);
  radii.push_back(0.0);
  return radii;
}

RateField minimal_rate(const Concentration& j, const std::vector<double>& radius_ladder) {
  if (radius_ladder.empty()) throw std::invalid_argument("minimal_rate: empty radius ladder");
  for (std::size_t k = 0; k < radius_ladder.size(); ++k) {
    if (radius_ladder[k] < 0) throw std::invalid_argument("minimal_rate: negative radius");
    if (k > 0 && !(radius_ladder[k] < radius_ladder[k - 1])) {
      throw std::invalid_argument("minimal_rate: radii must decrease");
    }
  }
  const GridSpace& space = j.space();
  std::vector<ExtendedValue> values;
  values.reserve(space.size());
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const std::vector<double> center = space.point(flat);
    // -inf over the ladder of J(ball): a rolling max of -J enforces the
    // monotone-in-radius trend against numerical wobble.
    ExtendedValue best = ExtendedValue::neg_inf();
    for (double r : radius_ladder) {
      best = vmax(best, -j.eval(lattice_ball(space, center, r)));
    }
    if (best.is_neg_inf()) best = ExtendedValue(0.0);  // J == 0 on every ball
    values.push_back(best);
  }
  return RateField(space, std::move(values), RateField::Provenance::minimal);
}

RateField minimal_rate(const Concentration& j) {
  return minimal_rate(j, default_radius_ladder(j.space()));
}

namespace {

struct SideOutcome {
  bool pass = true;
  double worst = 0.0;
  json witness = json::object();

  void offend(double violation, json w) {
    if (violation > worst) {
      worst = violation;
      witness = std::move(w);
    }
  }
  void finish(double tol) { pass = worst <= tol; }
  json to_json() const {
    return json{{"pass", pass}, {"worst_violation", json_number(worst)}, {"witness", witness}};
  }
};

// Violation of a <= b as a nonnegative double (+inf when only b is -inf).
double gap_above(const ExtendedValue& a, const ExtendedValue& b) {
  if (a <= b) return 0.0;
  if (a.is_finite() && b.is_finite()) return a.value() - b.value();
  return std::numeric_limits<double>::infinity();
}

std::vector<double> dyadic_levels() {
  std::vector<double> levels;
  for (int k = -16; k <= 16; ++k) levels.push_back(k / 8.0);
  return levels;
}

GridFunction random_dyadic_function(const GridSpace& space, std::mt19937_64& rng,
                                    bool allow_neg_inf) {
  static const std::vector<double> levels = dyadic_levels();
  std::uniform_int_distribution<std::size_t> pick(0, levels.size() - 1);
  std::uniform_int_distribution<int> inf_roll(0, 7);
  std::vector<ExtendedValue> values;
  values.reserve(space.size());
  bool any_finite = false;
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    if (allow_neg_inf && inf_roll(rng) == 0) {
      values.push_back(ExtendedValue::neg_inf());
    } else {
      values.push_back(ExtendedValue(levels[pick(rng)]));
      any_finite = true;
    }
  }
  if (!any_finite) values[0] = ExtendedValue(0.0);
  return GridFunction(space, std::move(values), Regularity::measurable);
}

std::vector<PointSet> all_nonempty_subsets(const GridSpace& space) {
  const std::size_t n = space.size();
  std::vector<PointSet> subsets;
  for (std::size_t mask_bits = 1; mask_bits < (std::size_t{1} << n); ++mask_bits) {
    PointSet a = PointSet::none(space);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask_bits & (std::size_t{1} << i)) a.add(i);
    }
    subsets.push_back(std::move(a));
  }
  return subsets;
}

}  // namespace

CheckReport check_duality_bounds(const Concentration& j, const RateField& i, int trials,
                                 unsigned long long seed, double tol) {
  if (i.space() != j.space()) throw std::invalid_argument("check_duality_bounds: space mismatch");
  if (trials < 1) throw std::invalid_argument("check_duality_bounds: trials must be >= 1");
  const GridSpace& space = j.space();
  const bool exhaustive = space.topology() == GridTopology::discrete && space.size() <= 12;
  std::mt19937_64 rng(seed);

  // Sets in their open role (lower bound) and closed role (upper bound).
  std::vector<PointSet> opens, closeds;
  if (exhaustive) {
    opens = all_nonempty_subsets(space);  // every set is clopen
    closeds = opens;
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, space.size() - 1);
    std::uniform_int_distribution<int> radius_steps(0, 6);
    for (int t = 0; t < std::max(trials, 1); ++t) {
      const std::vector<double> center = space.point(pick(rng));
      const PointSet ball = lattice_ball(space, center, radius_steps(rng) * space.max_step());
      opens.push_back(interior(ball));
      closeds.push_back(closure(ball));
      opens.push_back(interior(closure(ball).complement()));
      closeds.push_back(closure(ball.complement()));
    }
  }

  SideOutcome lower_sets, upper_sets, lower_fns, upper_fns;
  std::vector<PointSet> lower_set_witnesses, upper_set_witnesses;

  auto eval_lower_set = [&](const PointSet& o, SideOutcome& out, std::vector<PointSet>* keep) {
    // -inf over O of I <= J(O)
    const ExtendedValue lhs = -i.inf_over(o);
    const ExtendedValue rhs = j.eval(o);
    const double violation = gap_above(lhs, rhs);
    if (violation > 0 && keep) keep->push_back(o);
    out.offend(violation, json{{"role", "open"},
                               {"set_size", o.count()},
                               {"neg_inf_rate", json_number(lhs)},
                               {"j", json_number(rhs)}});
  };
  auto eval_upper_set = [&](const PointSet& c, SideOutcome& out, std::vector<PointSet>* keep) {
    // J(C) <= -inf over C of I
    const ExtendedValue lhs = j.eval(c);
    const ExtendedValue rhs = -i.inf_over(c);
    const double violation = gap_above(lhs, rhs);
    if (violation > 0 && keep) keep->push_back(c);
    out.offend(violation, json{{"role", "closed"},
                               {"set_size", c.count()},
                               {"j", json_number(lhs)},
                               {"neg_inf_rate", json_number(rhs)}});
  };

  for (const PointSet& o : opens) eval_lower_set(o, lower_sets, &lower_set_witnesses);
  for (const PointSet& c : closeds) eval_upper_set(c, upper_sets, &upper_set_witnesses);

  // Function sides. Lower needs lsc test functions, upper usc ones; masked
  // constants over open/closed sets realize those roles, and violating sets
  // replay as masked functions so both sides of each equivalence stay
  // consistent.
  struct RoleFn {
    GridFunction f;
    std::string origin;
  };
  std::vector<RoleFn> lsc_fns, usc_fns;
  const int fn_trials = std::max(trials, 1);
  for (int t = 0; t < fn_trials; ++t) {
    GridFunction f = random_dyadic_function(space, rng, true);
    lsc_fns.push_back({mask(f, PointSet::all(space), Regularity::lower_semicontinuous), "random"});
    usc_fns.push_back({mask(f, PointSet::all(space), Regularity::upper_semicontinuous), "random"});
  }
  const double big = 2.0;
  std::size_t replayed = 0;
  for (const PointSet& o : lower_set_witnesses) {
    lsc_fns.push_back({mask(GridFunction::constant(space, big), o,
                            Regularity::lower_semicontinuous),
                       "replayed open-set witness"});
    ++replayed;
  }
  for (const PointSet& c : upper_set_witnesses) {
    usc_fns.push_back({mask(GridFunction::constant(space, big), c,
                            Regularity::upper_semicontinuous),
                       "replayed closed-set witness"});
    ++replayed;
  }

  std::vector<PointSet> fn_level_witnesses_lower, fn_level_witnesses_upper;
  for (const RoleFn& rf : lsc_fns) {
    // phi_J(f) >= sup(f - I)
    const ExtendedValue lhs = sup_f_minus_rate(rf.f, i);
    const ExtendedValue rhs = convex_integral(rf.f, j);
    const double violation = gap_above(lhs, rhs);
    if (violation > 0) {
      for (double c : rf.f.distinct_finite_values_desc()) {
        fn_level_witnesses_lower.push_back(rf.f.level_set_ge(c));
      }
    }
    lower_fns.offend(violation, json{{"origin", rf.origin},
                                     {"sup_f_minus_rate", json_number(lhs)},
                                     {"convex_integral", json_number(rhs)}});
  }
  for (const RoleFn& rf : usc_fns) {
    // phi_J(f) <= sup(f - I)
    const ExtendedValue lhs = convex_integral(rf.f, j);
    const ExtendedValue rhs = sup_f_minus_rate(rf.f, i);
    const double violation = gap_above(lhs, rhs);
    if (violation > 0) {
      for (double c : rf.f.distinct_finite_values_desc()) {
        fn_level_witnesses_upper.push_back(rf.f.level_set_ge(c));
      }
    }
    upper_fns.offend(violation, json{{"origin", rf.origin},
                                     {"convex_integral", json_number(lhs)},
                                     {"sup_f_minus_rate", json_number(rhs)}});
  }

  // Replay level sets of violating functions on the set side.
  for (const PointSet& o : fn_level_witnesses_lower) eval_lower_set(o, lower_sets, nullptr);
  for (const PointSet& c : fn_level_witnesses_upper) eval_upper_set(c, upper_sets, nullptr);

  lower_sets.finish(tol);
  upper_sets.finish(tol);
  lower_fns.finish(tol);
  upper_fns.finish(tol);

  const bool lower_consistent = lower_sets.pass == lower_fns.pass;
  const bool upper_consistent = upper_sets.pass == upper_fns.pass;

  CheckReport report;
  report.check = "duality-bounds-equivalence";
  report.pass = lower_consistent && upper_consistent;
  report.worst_violation =
      report.pass ? 0.0
                  : std::max(std::max(lower_sets.worst, lower_fns.worst),
                             std::max(upper_sets.worst, upper_fns.worst));
  report.details = json{{"mode", exhaustive ? "exhaustive" : "sampled"},
                        {"tolerance", tol},
                        {"replayed_candidates", replayed},
                        {"lower", json{{"sets", lower_sets.to_json()},
                                       {"functions", lower_fns.to_json()},
                                       {"consistent", lower_consistent}}},
                        {"upper", json{{"sets", upper_sets.to_json()},
                                       {"functions", upper_fns.to_json()},
                                       {"consistent", upper_consistent}}}};
  report.witness = json{{"lower_consistent", lower_consistent},
                        {"upper_consistent", upper_consistent}};
  return report;
}

CheckReport check_integral_properties(const Concentration& j, int trials,
                                      unsigned long long seed, double tol) {
  if (trials < 1) throw std::invalid_argument("check_integral_properties: trials must be >= 1");
  const GridSpace& space = j.space();
  std::mt19937_64 rng(seed);
  const bool maxplus = j.kind() == Concentration::Kind::maxplus_density;

  json properties = json::object();
  double worst = 0.0;
  auto record = [&](const char* name, double violation, json detail) {
    detail["violation"] = json_number(violation);
    properties[name] = detail;
    worst = std::max(worst, violation);
  };

  std::uniform_int_distribution<std::size_t> pick(0, space.size() - 1);
  static const std::vector<double> lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};

  double b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0, b7 = 0;
  // b2: phi_J(0) = 0.
  {
    const ExtendedValue v = convex_integral(GridFunction::constant(space, 0.0), j);
    b2 = v.is_finite() ? std::abs(v.value()) : std::numeric_limits<double>::infinity();
  }
  for (int t = 0; t < trials; ++t) {
    // b1: phi_J(mask(0, A)) = J(A) on a random nonempty A.
    PointSet a = PointSet::none(space);
    for (std::size_t flat = 0; flat < space.size(); ++flat) {
      if (rng() % 3 == 0) a.add(flat);
    }
    if (a.empty()) a.add(pick(rng));
    const ExtendedValue lhs1 = convex_integral(mask(GridFunction::constant(space, 0.0), a), j);
    const ExtendedValue rhs1 = j.eval(a);
    b1 = std::max(b1, std::max(gap_above(lhs1, rhs1), gap_above(rhs1, lhs1)));

    const GridFunction f = random_dyadic_function(space, rng, true);
    const GridFunction g = random_dyadic_function(space, rng, true);
    const ExtendedValue phi_f = convex_integral(f, j);
    const ExtendedValue phi_g = convex_integral(g, j);

    // b3: translation by a dyadic constant, exact.
    const double c = static_cast<double>(static_cast<int>(rng() % 33)) / 8.0 - 2.0;
    const ExtendedValue lhs3 = convex_integral(add_const(f, c), j);
    const ExtendedValue rhs3 = phi_f + ExtendedValue(c);
    b3 = std::max(b3, std::max(gap_above(lhs3, rhs3), gap_above(rhs3, lhs3)));

    // b4: monotone: f <= max(f, g).
    const GridFunction h = pointwise_max(f, g);
    const ExtendedValue phi_h = convex_integral(h, j);
    b4 = std::max(b4, gap_above(phi_f, phi_h));

    // b5: truncations reach phi_J(f) exactly once past the finite range.
    if (const auto mf = f.max_finite()) {
      const double big = std::abs(*mf) + 3.0;
      const ExtendedValue top = convex_integral(min_with_const(f, big), j);
      b5 = std::max(b5, std::max(gap_above(top, phi_f), gap_above(phi_f, top)));
      const ExtendedValue mid = convex_integral(min_with_const(f, *mf - 0.5), j);
      b5 = std::max(b5, gap_above(mid, phi_f));  // monotone from below
      if (phi_f.is_finite()) {
        const double floor_m = std::abs(phi_f.value()) + 3.0;
        GridFunction raised = pointwise_max(f, GridFunction::constant(space, -floor_m));
        const ExtendedValue bot = convex_integral(raised, j);
        b5 = std::max(b5, std::max(gap_above(bot, phi_f), gap_above(phi_f, bot)));
      }
    }

    if (maxplus) {
      // b6: maxitivity.
      const ExtendedValue lhs6 = phi_h;
      b6 = std::max(b6, gap_above(lhs6, vmax(phi_f, phi_g)));
      // b7: convexity along the dyadic lambda grid.
      for (double lam : lambdas) {
        const ExtendedValue lhs7 = convex_integral(affine_combo(lam, f, g), j);
        ExtendedValue rhs7 = ExtendedValue::neg_inf();
        const ExtendedValue s1 = scaled(lam, phi_f);
        const ExtendedValue s2 = scaled(1.0 - lam, phi_g);
        if (s1.is_neg_inf() || s2.is_neg_inf()) {
          rhs7 = ExtendedValue::neg_inf();
        } else {
          rhs7 = s1 + s2;
        }
        b7 = std::max(b7, gap_above(lhs7, rhs7));
      }
    }
  }

  record("b1_mask_identity", b1, json::object());
  record("b2_zero", b2, json::object());
  record("b3_translation", b3, json::object());
  record("b4_monotone", b4, json::object());
  record("b5_truncation", b5, json::object());
  if (maxplus) {
    record("b6_maxitive", b6, json::object());
    record("b7_convex", b7, json::object());
  }

  CheckReport report;
  report.check = "convex-integral-properties";
  report.pass = worst <= tol;
  report.worst_violation = worst;
  report.details = json{{"trials", trials},
                        {"seed", seed},
                        {"tolerance", tol},
                        {"maxitive_properties_included", maxplus},
                        {"properties", properties}};
  return report;
}

}  // namespace ratelab
