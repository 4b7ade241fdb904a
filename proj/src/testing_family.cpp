#include "ratelab/testing_family.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>

#include "ratelab/catalog.hpp"

namespace ratelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Entropy records of inverted-v members are computed on a working box padded
// so every peak sits at least two steps inside. A peak on the box edge would
// otherwise have its rising segment extended onto the half-infinite tail cell
// and report divergence for a member whose true tails fall; the members are
// analytic, so sampling them on the wider box reproduces their exact shape.
// Linear members extend exactly as-is, and table-backed custom members cannot
// be evaluated off their grid, so both keep the original box, as does any
// model that cannot be rebuilt through the catalog.
EntropyModel record_evaluation_model(const EntropyModel& model, const TestingFamily& h) {
  if (h.kind() != TestingFamily::Kind::inverted_v || h.size() == 0) return model;
  const GridSpace& box = model.space();
  if (box.dim() != 1 || !is_known_model_id(model.id())) return model;
  double peak_min = kInf;
  double peak_max = -kInf;
  for (const std::vector<double>& p : h.params()) {
    peak_min = std::min(peak_min, p[0]);
    peak_max = std::max(peak_max, p[0]);
  }
  const double step = box.step(0);
  const double lo = box.coord(0, 0);
  const double hi = box.coord(box.size() - 1, 0);
  const int pad_lo =
      std::max(0, static_cast<int>(std::ceil((lo - (peak_min - 2.0 * step)) / step)));
  const int pad_hi =
      std::max(0, static_cast<int>(std::ceil(((peak_max + 2.0 * step) - hi) / step)));
  if (pad_lo == 0 && pad_hi == 0) return model;
  const GridSpace wide =
      GridSpace::line(lo - pad_lo * step, hi + pad_hi * step,
                      box.size() + static_cast<std::size_t>(pad_lo + pad_hi));
  return make_model(model.id(), wide, model.n_ladder(), model.tail_window());
}

std::vector<std::vector<double>> arithmetic_params(double lo, double hi, double step,
                                                   const char* what) {
  if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument(std::string(what) + ": bad parameter range");
  }
  if (hi < lo - 1e-12) throw std::invalid_argument(std::string(what) + ": max below min");
  const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<std::vector<double>> params;
  params.reserve(count);
  for (int k = 0; k < count; ++k) params.push_back({lo + k * step});
  return params;
}

double parse_scalar(const std::string& text, const char* what) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + text + "'");
  }
  if (pos != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + text + "'");
  }
  return v;
}

std::vector<double> split_numbers(const std::string& text, std::size_t expected,
                                  const char* what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    out.push_back(parse_scalar(
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start),
        what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != expected) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " comma-separated numbers");
  }
  return out;
}

double abs_difference(const ExtendedValue& a, const ExtendedValue& b) {
  if (a == b) return 0.0;
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
  return kInf;
}

}  // namespace

TestingFamily::TestingFamily(Kind kind, std::vector<std::vector<double>> params, Eval eval,
                             std::string spec)
    : kind_(kind), params_(std::move(params)), eval_(std::move(eval)), spec_(std::move(spec)) {
  if (!eval_) throw std::invalid_argument("TestingFamily: missing evaluator");
}

TestingFamily TestingFamily::linear(double ymin, double ymax, double step) {
  auto params = arithmetic_params(ymin, ymax, step, "linear family");
  Eval eval = [](const std::vector<double>& param, const std::vector<double>& x) {
    return param[0] * x.at(0);
  };
  return TestingFamily(Kind::linear, std::move(params), std::move(eval),
                       "linear:" + std::to_string(ymin) + "," + std::to_string(ymax) + "," +
                           std::to_string(step));
}

TestingFamily TestingFamily::inverted_v(double amin, double amax, double step) {
  auto params = arithmetic_params(amin, amax, step, "inverted-v family");
  Eval eval = [](const std::vector<double>& param, const std::vector<double>& x) {
    return std::abs(param[0]) - 2.0 * std::abs(x.at(0) - param[0]);
  };
  return TestingFamily(Kind::inverted_v, std::move(params), std::move(eval),
                       "invv:" + std::to_string(amin) + "," + std::to_string(amax) + "," +
                           std::to_string(step));
}

TestingFamily TestingFamily::custom(std::vector<std::vector<double>> params, Eval eval,
                                    std::string spec_string) {
  return TestingFamily(Kind::custom, std::move(params), std::move(eval), std::move(spec_string));
}

double TestingFamily::eval(std::size_t i, const std::vector<double>& x) const {
  const double v = eval_(params_.at(i), x);
  if (!std::isfinite(v)) {
    throw std::domain_error("TestingFamily: member produced a non-finite value");
  }
  return v;
}

GridFunction TestingFamily::member(const GridSpace& space, std::size_t i) const {
  return GridFunction::from_fn(
      space, [this, i](const std::vector<double>& x) { return eval(i, x); },
      Regularity::continuous);
}

TestingFamily parse_family(const std::string& spec, const GridSpace& space) {
  if (spec.rfind("linear:", 0) == 0 || spec.rfind("invv:", 0) == 0) {
    if (space.dim() != 1) {
      throw std::invalid_argument("parse_family: linear/invv families are one-dimensional");
    }
    if (spec.rfind("linear:", 0) == 0) {
      const auto v = split_numbers(spec.substr(7), 3, "linear family");
      return TestingFamily::linear(v[0], v[1], v[2]);
    }
    const auto v = split_numbers(spec.substr(5), 3, "inverted-v family");
    return TestingFamily::inverted_v(v[0], v[1], v[2]);
  }
  if (spec.rfind("custom:", 0) == 0) {
    const std::string path = spec.substr(7);
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("parse_family: cannot open '" + path + "'");
    json doc;
    try {
      in >> doc;
    } catch (const std::exception& e) {
      throw std::invalid_argument("parse_family: bad JSON in '" + path + "': " + e.what());
    }
    if (!doc.is_object() || !doc.contains("params") || !doc.contains("values") ||
        !doc["params"].is_array() || !doc["values"].is_array() ||
        doc["params"].size() != doc["values"].size() || doc["params"].empty()) {
      throw std::invalid_argument(
          "parse_family: custom file needs parallel nonempty 'params' and 'values' arrays");
    }
    std::vector<std::vector<double>> params;
    auto table = std::make_shared<std::vector<std::vector<double>>>();
    for (std::size_t i = 0; i < doc["params"].size(); ++i) {
      const json& prow = doc["params"][i];
      const json& vrow = doc["values"][i];
      if (!prow.is_array() || prow.empty() || !vrow.is_array() ||
          vrow.size() != space.size()) {
        throw std::invalid_argument(
            "parse_family: each member needs a parameter vector and one value per grid point");
      }
      std::vector<double> p, v;
      for (const json& e : prow) {
        if (!e.is_number()) throw std::invalid_argument("parse_family: non-numeric parameter");
        p.push_back(e.get<double>());
      }
      for (const json& e : vrow) {
        if (!e.is_number()) throw std::invalid_argument("parse_family: non-numeric value");
        const double d = e.get<double>();
        if (!std::isfinite(d)) throw std::invalid_argument("parse_family: values must be finite");
        v.push_back(d);
      }
      params.push_back(std::move(p));
      table->push_back(std::move(v));
    }
    std::map<std::vector<double>, std::size_t> index;
    for (std::size_t i = 0; i < params.size(); ++i) index[params[i]] = i;
    if (index.size() != params.size()) {
      throw std::invalid_argument("parse_family: duplicate member parameters");
    }
    GridSpace grid = space;
    TestingFamily::Eval eval = [table, index, grid](const std::vector<double>& param,
                                                    const std::vector<double>& x) {
      const auto it = index.find(param);
      if (it == index.end()) throw std::domain_error("custom family: unknown parameter");
      return (*table)[it->second][grid.index_of_point(x)];
    };
    return TestingFamily::custom(std::move(params), std::move(eval), spec);
  }
  throw std::invalid_argument("parse_family: unknown family spec '" + spec + "'");
}

std::vector<MemberRecord> member_records(const EntropyModel& model, const TestingFamily& h) {
  const EntropyModel eval_model = record_evaluation_model(model, h);
  std::vector<MemberRecord> records;
  records.reserve(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const GridFunction f = h.member(eval_model.space(), i);
    MemberRecord rec;
    rec.entropy = asymptotic_entropy(eval_model, f);
    rec.growth = growth_membership(eval_model, f);
    records.push_back(std::move(rec));
  }
  return records;
}

RateField conjugate_rate(const GridSpace& space, const TestingFamily& h,
                         const std::vector<ExtendedValue>& psi_values, ConjugateStats* stats) {
  if (h.size() == 0) throw std::invalid_argument("conjugate_rate: empty family");
  if (psi_values.size() != h.size()) {
    throw std::invalid_argument("conjugate_rate: one entropy value per member required");
  }
  std::size_t skipped = 0;
  for (const ExtendedValue& v : psi_values) {
    if (v.is_neg_inf()) {
      throw std::invalid_argument("conjugate_rate: entropy of a real-valued member cannot be -inf");
    }
    if (v.is_pos_inf()) ++skipped;
  }
  if (stats) {
    stats->members = h.size();
    stats->skipped_infinite = skipped;
  }
  if (skipped == h.size()) {
    throw std::domain_error("conjugate_rate: every member has infinite entropy");
  }

  std::vector<ExtendedValue> values;
  values.reserve(space.size());
  for (std::size_t flat = 0; flat < space.size(); ++flat) {
    const std::vector<double> x = space.point(flat);
    double best = -kInf;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (psi_values[i].is_pos_inf()) continue;
      best = std::max(best, h.eval(i, x) - psi_values[i].value());
    }
    if (best < -1e-9) {
      throw std::domain_error("conjugate_rate: negative conjugate value " + std::to_string(best));
    }
    values.push_back(ExtendedValue(std::max(best, 0.0)));
  }
  return RateField(space, std::move(values), RateField::Provenance::conjugate);
}

RateField conjugate_rate(const EntropyModel& model, const TestingFamily& h,
                         ConjugateStats* stats) {
  const EntropyModel eval_model = record_evaluation_model(model, h);
  std::vector<ExtendedValue> psi;
  psi.reserve(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const AsymptoticRecord rec = asymptotic_entropy(eval_model, h.member(eval_model.space(), i));
    psi.push_back(rec.diverged ? ExtendedValue::pos_inf() : rec.upper);
  }
  return conjugate_rate(model.space(), h, psi, stats);
}

ExposedSet::ExposedSet(GridSpace s)
    : space(std::move(s)),
      exposed(space.size(), 0),
      nice(space.size(), 0),
      member(space.size(), -1),
      param(space.size()) {}

std::size_t ExposedSet::count_exposed() const {
  return static_cast<std::size_t>(std::count(exposed.begin(), exposed.end(), char(1)));
}

PointSet ExposedSet::as_point_set() const {
  std::vector<std::size_t> indices;
  for (std::size_t flat = 0; flat < exposed.size(); ++flat) {
    if (exposed[flat]) indices.push_back(flat);
  }
  return PointSet::of(space, indices);
}

ExposedSet detect_exposed(const TestingFamily& h, const RateField& rate,
                          const std::vector<MemberRecord>& records, double margin,
                          double radius) {
  if (h.size() == 0) throw std::invalid_argument("detect_exposed: empty family");
  if (records.size() != h.size()) {
    throw std::invalid_argument("detect_exposed: one record per member required");
  }
  if (!(margin > 0.0)) throw std::invalid_argument("detect_exposed: margin must be positive");
  const GridSpace& space = rate.space();
  if (radius < space.max_step() - 1e-12) {
    throw std::invalid_argument("detect_exposed: radius must be at least one grid step");
  }

  ExposedSet result(space);
  result.margin = margin;
  result.radius = radius;

  const std::size_t count = space.size();
  std::vector<double> d(count);
  for (std::size_t i = 0; i < h.size(); ++i) {
    // d(z) = rate(z) - f(z); +inf where the rate is +inf.
    double best = kInf;
    std::size_t best_flat = 0;
    std::size_t attainers = 0;
    for (std::size_t flat = 0; flat < count; ++flat) {
      const ExtendedValue rv = rate.value(flat);
      d[flat] = rv.is_pos_inf() ? kInf : rv.value() - h.eval(i, space.point(flat));
      if (d[flat] < best) {
        best = d[flat];
        best_flat = flat;
        attainers = 1;
      } else if (d[flat] == best) {
        ++attainers;
      }
    }
    if (best == kInf || attainers != 1) continue;

    bool qualifies = true;
    for (std::size_t flat = 0; flat < count && qualifies; ++flat) {
      if (flat == best_flat) continue;
      if (euclidean_distance(space, flat, best_flat) >= radius) {
        if (!(d[flat] - best >= margin)) qualifies = false;
      }
      // Inside the radius the strict gap d[flat] > best already holds
      // because the minimum is unique.
    }
    if (!qualifies) continue;

    const std::vector<double>& p = h.param(i);
    if (result.member[best_flat] >= 0) {
      const std::vector<double>& incumbent = result.param[best_flat];
      if (!std::lexicographical_compare(p.begin(), p.end(), incumbent.begin(),
                                        incumbent.end())) {
        continue;  // keep the lexicographically smaller exposing parameter
      }
    }
    result.exposed[best_flat] = 1;
    result.member[best_flat] = static_cast<int>(i);
    result.param[best_flat] = p;
    result.nice[best_flat] =
        (records[i].entropy.converged && records[i].growth.in_class) ? 1 : 0;
  }
  return result;
}

ExposedSet detect_exposed(const EntropyModel& model, const TestingFamily& h,
                          const RateField& rate, double margin, double radius) {
  return detect_exposed(h, rate, member_records(model, h), margin, radius);
}

CheckReport check_richness(const RateField& rate, const ExposedSet& exposed,
                           const std::vector<double>& ball_radii, double tol) {
  if (exposed.space != rate.space()) {
    throw std::invalid_argument("check_richness: space mismatch");
  }
  if (ball_radii.empty()) throw std::invalid_argument("check_richness: no ball radii");
  for (double r : ball_radii) {
    if (!(r > 0.0)) throw std::invalid_argument("check_richness: radii must be positive");
  }

  const GridSpace& space = rate.space();
  double worst = 0.0;
  json witness = json::object();
  for (std::size_t center = 0; center < space.size(); ++center) {
    const std::vector<double> c = space.point(center);
    for (double r : ball_radii) {
      const PointSet ball = lattice_ball(space, c, r);
      ExtendedValue inf_ball = ExtendedValue::pos_inf();
      ExtendedValue inf_exposed = ExtendedValue::pos_inf();
      for (std::size_t flat : ball.indices()) {
        inf_ball = vmin(inf_ball, rate.value(flat));
        if (exposed.exposed[flat]) inf_exposed = vmin(inf_exposed, rate.value(flat));
      }
      double violation;
      if (inf_exposed == inf_ball) {
        violation = 0.0;
      } else if (inf_exposed.is_finite() && inf_ball.is_finite()) {
        violation = std::max(0.0, inf_exposed.value() - inf_ball.value());
      } else if (inf_exposed.is_pos_inf()) {
        violation = kInf;  // ball misses the exposed set entirely
      } else {
        violation = 0.0;
      }
      if (violation > worst) {
        worst = violation;
        witness = json{{"center", c},
                       {"radius", r},
                       {"inf_ball", json_number(inf_ball)},
                       {"inf_ball_exposed", json_number(inf_exposed)}};
      }
    }
  }

  CheckReport report;
  report.check = "exposed-point-richness";
  report.pass = worst <= tol;
  report.worst_violation = worst;
  report.witness = witness;
  report.proxy = "lattice balls around every grid point";
  report.details = json{{"ball_radii", ball_radii},
                        {"exposed_count", exposed.count_exposed()},
                        {"tolerance", tol}};
  return report;
}

CheckReport exposing_family_check(const EntropyModel& model, const TestingFamily& h,
                                  double tol) {
  const GridSpace& space = model.space();
  if (h.size() != space.size()) {
    throw std::invalid_argument(
        "exposing_family_check: family must have exactly one member per grid point");
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const std::vector<double>& p = h.param(i);
    const std::vector<double> x = space.point(i);
    if (p.size() != x.size()) {
      throw std::invalid_argument("exposing_family_check: parameter dimension mismatch");
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (std::abs(p[k] - x[k]) > 1e-9) {
        throw std::invalid_argument(
            "exposing_family_check: member parameters must equal grid coordinates");
      }
    }
  }

  // (1) Sampled members must have vanishing asymptotic entropy.
  const EntropyModel eval_model = record_evaluation_model(model, h);
  double entropy_worst = 0.0;
  json samples = json::array();
  std::vector<std::size_t> sample_idx;
  for (int k = 0; k <= 8; ++k) {
    sample_idx.push_back(static_cast<std::size_t>(
        std::llround(k * double(space.size() - 1) / 8.0)));
  }
  sample_idx.erase(std::unique(sample_idx.begin(), sample_idx.end()), sample_idx.end());
  for (std::size_t i : sample_idx) {
    const AsymptoticRecord rec = asymptotic_entropy(eval_model, h.member(eval_model.space(), i));
    const double v = std::max(abs_difference(rec.upper, ExtendedValue(0.0)),
                              abs_difference(rec.lower, ExtendedValue(0.0)));
    entropy_worst = std::max(entropy_worst, v);
    samples.push_back(json{{"member", i},
                           {"upper", json_number(rec.upper)},
                           {"lower", json_number(rec.lower)}});
  }
  const bool entropies_ok = entropy_worst <= tol;

  // (2) Strictness: the column sup over the family is attained only on the
  // diagonal.
  std::vector<std::vector<double>> values(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    values[i].reserve(space.size());
    for (std::size_t z = 0; z < space.size(); ++z) {
      values[i].push_back(h.eval(i, space.point(z)));
    }
  }
  std::size_t strictness_violations = 0;
  double strictness_worst = 0.0;
  json strict_witness = json::object();
  std::vector<double> column_sup(space.size());
  for (std::size_t z = 0; z < space.size(); ++z) {
    double best = -kInf;
    for (std::size_t i = 0; i < h.size(); ++i) best = std::max(best, values[i][z]);
    column_sup[z] = best;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (i != z && values[i][z] == best) {
        ++strictness_violations;
        const double gap = best - values[z][z];
        if (strictness_violations == 1 || gap > strictness_worst) {
          strict_witness = json{{"point", z}, {"member", i}, {"sup", json_number(best)}};
        }
        strictness_worst = std::max(strictness_worst, gap);
      }
    }
  }
  const bool strict_ok = strictness_violations == 0;

  // Conclusion: with zero entropies the conjugate is the pointwise family
  // sup, and every grid point is exposed.
  double conjugate_worst = 0.0;
  bool all_exposed = false;
  if (entropies_ok && strict_ok) {
    const std::vector<ExtendedValue> zeros(h.size(), ExtendedValue(0.0));
    const RateField rate0 = conjugate_rate(space, h, zeros);
    for (std::size_t z = 0; z < space.size(); ++z) {
      conjugate_worst =
          std::max(conjugate_worst,
                   abs_difference(rate0.value(z), ExtendedValue(std::max(column_sup[z], 0.0))));
    }
    std::vector<MemberRecord> nominal(h.size());
    for (MemberRecord& rec : nominal) {
      rec.entropy.converged = true;
      rec.growth.in_class = true;
    }
    const ExposedSet exposed =
        detect_exposed(h, rate0, nominal, 1e-9, 2.0 * space.max_step());
    all_exposed = exposed.count_exposed() == space.size();
  }

  const bool pass = entropies_ok && strict_ok && conjugate_worst <= 1e-9 && all_exposed;
  CheckReport report;
  report.check = "exposing-family";
  report.pass = pass;
  report.worst_violation = std::max({entropy_worst, strictness_worst, conjugate_worst});
  report.witness = strict_ok ? json::object() : strict_witness;
  report.proxy = "sampled member entropies";
  report.details = json{{"entropy_samples", samples},
                        {"entropy_worst", json_number(entropy_worst)},
                        {"strictness_violations", strictness_violations},
                        {"conjugate_matches_sup", conjugate_worst <= 1e-9},
                        {"all_points_exposed", all_exposed},
                        {"tolerance", tol}};
  return report;
}

}  // namespace ratelab
