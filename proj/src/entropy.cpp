#include "ratelab/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "ratelab/concentration.hpp"
#include "ratelab/convex_integral.hpp"
#include "ratelab/numerics.hpp"

namespace ratelab {

EntropyModel::EntropyModel(std::string id, GridSpace space, PerN per_n, LogCapacity log_capacity,
                           std::vector<int> n_ladder, int tail_window)
    : id_(std::move(id)),
      space_(std::move(space)),
      per_n_(std::move(per_n)),
      log_capacity_(std::move(log_capacity)),
      ladder_(std::move(n_ladder)),
      window_(tail_window) {
  if (!per_n_) throw std::invalid_argument("EntropyModel: missing per-n evaluator");
  if (ladder_.empty()) throw std::invalid_argument("EntropyModel: empty n ladder");
  for (std::size_t k = 0; k < ladder_.size(); ++k) {
    if (ladder_[k] <= 0) throw std::invalid_argument("EntropyModel: ladder entries must be positive");
    if (k > 0 && ladder_[k] <= ladder_[k - 1]) {
      throw std::invalid_argument("EntropyModel: ladder must be strictly increasing");
    }
  }
  if (window_ < 1 || static_cast<std::size_t>(window_) > ladder_.size()) {
    throw std::invalid_argument("EntropyModel: tail window must fit inside the ladder");
  }
}

ExtendedValue EntropyModel::per_n_entropy(const GridFunction& f, int n) const {
  if (f.space() != space_) throw std::invalid_argument("EntropyModel: function lives on another grid");
  if (n <= 0) throw std::invalid_argument("EntropyModel: n must be positive");
  return per_n_(f, n);
}

double EntropyModel::log_capacity(const PointSet& a, int n) const {
  if (!has_capacity()) throw std::logic_error("EntropyModel: no capacity evaluator");
  if (a.space() != space_) throw std::invalid_argument("EntropyModel: set lives on another grid");
  if (n <= 0) throw std::invalid_argument("EntropyModel: n must be positive");
  return log_capacity_(a, n);
}

double EntropyModel::capacity(const PointSet& a, int n) const {
  return std::exp(log_capacity(a, n));
}

EntropyModel EntropyModel::with_ladder(std::vector<int> n_ladder, int tail_window) const {
  return EntropyModel(id_, space_, per_n_, log_capacity_, std::move(n_ladder), tail_window);
}

ExtendedValue entropy_at(const EntropyModel& model, const GridFunction& f, int n) {
  return model.per_n_entropy(f, n);
}

AsymptoticRecord asymptotic_entropy(const EntropyModel& model, const GridFunction& f,
                                    double converge_tol) {
  const std::vector<int>& ladder = model.n_ladder();
  const int window = model.tail_window();
  std::vector<ExtendedValue> window_values;
  window_values.reserve(window);
  for (std::size_t k = ladder.size() - static_cast<std::size_t>(window); k < ladder.size(); ++k) {
    window_values.push_back(model.per_n_entropy(f, ladder[k]));
  }

  AsymptoticRecord rec;
  bool any_pos_inf = false;
  ExtendedValue lo = ExtendedValue::pos_inf();
  ExtendedValue hi = ExtendedValue::neg_inf();
  for (const ExtendedValue& v : window_values) {
    if (v.is_pos_inf()) any_pos_inf = true;
    lo = vmin(lo, v);
    hi = vmax(hi, v);
  }
  rec.lower = lo;
  rec.upper = hi;

  if (any_pos_inf) {
    rec.diverged = true;
    rec.converged = false;
    return rec;
  }

  // Secondary divergence probe: the whole window sits above the attainable
  // range (max f + 1) and is still rising.
  const auto max_f = f.max_finite();
  if (max_f && hi.is_finite()) {
    bool all_above = true;
    bool rising = true;
    for (std::size_t k = 0; k < window_values.size(); ++k) {
      if (window_values[k].is_neg_inf() || window_values[k].value() <= *max_f + 1.0) {
        all_above = false;
      }
      if (k > 0 && window_values[k] <= window_values[k - 1]) rising = false;
    }
    if (all_above && rising && window_values.size() >= 2) {
      rec.diverged = true;
      rec.upper = ExtendedValue::pos_inf();
      rec.converged = false;
      return rec;
    }
  }

  if (lo.is_neg_inf() && hi.is_neg_inf()) {
    rec.converged = true;  // entropy is identically -inf along the window
  } else if (lo.is_finite() && hi.is_finite()) {
    rec.converged = hi.value() - lo.value() <= converge_tol;
  } else {
    rec.converged = false;
  }
  return rec;
}

GrowthRecord growth_membership(const EntropyModel& model, const GridFunction& f,
                               std::optional<double> t) {
  std::vector<double> candidates;
  if (t.has_value()) {
    if (!(*t > 1.0)) throw std::invalid_argument("growth_membership: t must exceed 1");
    candidates.push_back(*t);
  } else {
    candidates = {1.5, 1.1};
  }
  GrowthRecord rec;
  for (double cand : candidates) {
    const AsymptoticRecord probe = asymptotic_entropy(model, scale(cand, f));
    rec.witness_t = cand;
    rec.tested = probe;
    rec.in_class = !probe.diverged && !probe.upper.is_pos_inf();
    if (rec.in_class) return rec;
  }
  return rec;
}

CheckReport check_tail_lemma(const EntropyModel& model, const GridFunction& f,
                             const std::vector<double>& m_ladder, double floor_value) {
  if (m_ladder.empty()) throw std::invalid_argument("check_tail_lemma: empty m ladder");
  for (std::size_t k = 1; k < m_ladder.size(); ++k) {
    if (m_ladder[k] <= m_ladder[k - 1]) {
      throw std::invalid_argument("check_tail_lemma: m ladder must increase");
    }
  }
  if (!growth_membership(model, f).in_class) {
    throw std::invalid_argument("check_tail_lemma: function fails the growth hypothesis");
  }

  json rows = json::array();
  std::vector<ExtendedValue> uppers;
  for (double m : m_ladder) {
    const GridFunction fm = mask(f, f.level_set_ge(m));
    const AsymptoticRecord rec = asymptotic_entropy(model, fm);
    uppers.push_back(rec.upper);
    rows.push_back(json{{"m", m},
                        {"upper", json_number(rec.upper)},
                        {"lower", json_number(rec.lower)}});
  }

  double worst = 0.0;
  // Masked tails must be nonincreasing in m and end at or below the floor.
  for (std::size_t k = 1; k < uppers.size(); ++k) {
    if (uppers[k].is_finite() && uppers[k - 1].is_finite()) {
      worst = std::max(worst, uppers[k].value() - uppers[k - 1].value());
    } else if (uppers[k - 1].is_neg_inf() && !uppers[k].is_neg_inf()) {
      worst = std::numeric_limits<double>::infinity();
    } else if (uppers[k].is_pos_inf()) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  const ExtendedValue last = uppers.back();
  if (last.is_pos_inf()) {
    worst = std::numeric_limits<double>::infinity();
  } else if (last.is_finite() && last.value() > floor_value) {
    worst = std::max(worst, last.value() - floor_value);
  }

  CheckReport report;
  report.check = "entropy-tail-decay";
  report.pass = worst <= 1e-9;
  report.worst_violation = worst;
  report.proxy = "tail-window";
  report.details = json{{"floor", floor_value}, {"masked_entropies", rows}};
  report.witness = json{{"last_upper", json_number(last)}};
  return report;
}

CheckReport check_representation(const EntropyModel& model, const GridFunction& f, double tol) {
  if (f.regularity() != Regularity::continuous) {
    throw std::invalid_argument("check_representation: function must carry the continuous tag");
  }
  if (!growth_membership(model, f).in_class) {
    throw std::invalid_argument("check_representation: function fails the growth hypothesis");
  }
  if (!model.has_capacity()) {
    throw std::logic_error("check_representation: model has no capacity evaluator");
  }

  const AsymptoticRecord rec = asymptotic_entropy(model, f);
  const Concentration j_upper = capacity_limit_concentration(model, CapacityMode::upper);
  const ExtendedValue phi = convex_integral(f, j_upper);

  double violation;
  if (rec.upper.is_finite() && phi.is_finite()) {
    violation = std::abs(rec.upper.value() - phi.value());
  } else if (rec.upper == phi) {
    violation = 0.0;
  } else {
    violation = std::numeric_limits<double>::infinity();
  }

  CheckReport report;
  report.check = "entropy-representation";
  report.pass = violation <= tol;
  report.worst_violation = violation;
  report.proxy = "tail-window";
  report.details = json{{"entropy_upper", json_number(rec.upper)},
                        {"entropy_lower", json_number(rec.lower)},
                        {"convex_integral_upper_capacity", json_number(phi)},
                        {"tolerance", tol}};
  return report;
}

CheckReport check_largest_term(const std::vector<std::function<double(int)>>& log_sequences,
                               const std::vector<int>& n_ladder, int tail_window, double tol) {
  if (log_sequences.empty()) throw std::invalid_argument("check_largest_term: no sequences");
  if (n_ladder.empty() || tail_window < 1 ||
      static_cast<std::size_t>(tail_window) > n_ladder.size()) {
    throw std::invalid_argument("check_largest_term: bad ladder/window");
  }

  std::vector<int> window_ns(n_ladder.end() - tail_window, n_ladder.end());

  // Per-sequence window proxies of limsup/liminf of (1/n) log a_i(n).
  std::vector<double> seq_hi(log_sequences.size(), -std::numeric_limits<double>::infinity());
  std::vector<double> seq_lo(log_sequences.size(), std::numeric_limits<double>::infinity());
  double sum_hi = -std::numeric_limits<double>::infinity();
  double sum_lo = std::numeric_limits<double>::infinity();
  for (int n : window_ns) {
    std::vector<double> terms;
    terms.reserve(log_sequences.size());
    for (std::size_t i = 0; i < log_sequences.size(); ++i) {
      const double la = log_sequences[i](n);
      terms.push_back(la);
      seq_hi[i] = std::max(seq_hi[i], la / n);
      seq_lo[i] = std::min(seq_lo[i], la / n);
    }
    const double s = log_sum_exp(terms) / n;
    sum_hi = std::max(sum_hi, s);
    sum_lo = std::min(sum_lo, s);
  }

  // limsup (1/n) log sum <= max_i limsup (1/n) log a_i
  const double rhs_up = *std::max_element(seq_hi.begin(), seq_hi.end());
  const double up_violation = std::max(0.0, sum_hi - rhs_up);

  // liminf (1/n) log sum <= liminf a_1 v max_{i>=2} limsup a_i
  double rhs_low = seq_lo[0];
  for (std::size_t i = 1; i < log_sequences.size(); ++i) rhs_low = std::max(rhs_low, seq_hi[i]);
  const double low_violation = std::max(0.0, sum_lo - rhs_low);

  const double worst = std::max(up_violation, low_violation);
  json hi_arr = json::array();
  json lo_arr = json::array();
  for (double v : seq_hi) hi_arr.push_back(json_number(v));
  for (double v : seq_lo) lo_arr.push_back(json_number(v));
  CheckReport report;
  report.check = "largest-term-bounds";
  report.pass = worst <= tol;
  report.worst_violation = worst;
  report.proxy = "tail-window";
  report.details = json{{"window_ns", window_ns},
                        {"sum_upper", json_number(sum_hi)},
                        {"sum_lower", json_number(sum_lo)},
                        {"per_sequence_upper", hi_arr},
                        {"per_sequence_lower", lo_arr},
                        {"upper_violation", json_number(up_violation)},
                        {"lower_violation", json_number(low_violation)},
                        {"tolerance", tol}};
  return report;
}

}  // namespace ratelab
