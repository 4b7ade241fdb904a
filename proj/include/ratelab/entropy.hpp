#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"

namespace ratelab {

// Tail-window summary of the per-n entropy sweep. `lower`/`upper` are the
// window min/max standing in for liminf/limsup; `converged` means the two
// agree within tolerance; `diverged` means the sweep was flagged +inf.
struct AsymptoticRecord {
  ExtendedValue lower{0.0};
  ExtendedValue upper{0.0};
  bool converged = false;
  bool diverged = false;

  json to_json() const {
    json j;
    j["lower"] = json_number(lower);
    j["upper"] = json_number(upper);
    j["converged"] = converged;
    j["proxy"] = "tail-window";
    return j;
  }
};

struct GrowthRecord {
  bool in_class = false;
  double witness_t = 0.0;     // the scaling actually tested
  AsymptoticRecord tested;    // record of t*f at the witness
};

// A scaled family of expectations indexed by n. `per_n` returns
// (1/n) log E_n(exp(n f)); `log_capacity` (optional) returns log E_n(1_A).
// Evaluators are pure; the model is immutable after construction.
class EntropyModel {
 public:
  using PerN = std::function<ExtendedValue(const GridFunction&, int)>;
  using LogCapacity = std::function<double(const PointSet&, int)>;

  EntropyModel(std::string id, GridSpace space, PerN per_n, LogCapacity log_capacity,
               std::vector<int> n_ladder, int tail_window);

  const std::string& id() const { return id_; }
  const GridSpace& space() const { return space_; }
  const std::vector<int>& n_ladder() const { return ladder_; }
  int tail_window() const { return window_; }

  ExtendedValue per_n_entropy(const GridFunction& f, int n) const;

  bool has_capacity() const { return static_cast<bool>(log_capacity_); }
  double log_capacity(const PointSet& a, int n) const;
  double capacity(const PointSet& a, int n) const;

  EntropyModel with_ladder(std::vector<int> n_ladder, int tail_window) const;

 private:
  std::string id_;
  GridSpace space_;
  PerN per_n_;
  LogCapacity log_capacity_;
  std::vector<int> ladder_;
  int window_;
};

// (1/n) log E_n(exp(n f)). Divergent integrals come back as +inf, never as
// an overflow: everything is evaluated in log scale.
ExtendedValue entropy_at(const EntropyModel& model, const GridFunction& f, int n);

AsymptoticRecord asymptotic_entropy(const EntropyModel& model, const GridFunction& f,
                                    double converge_tol = 1e-2);

// Membership in the growth class {f : some t > 1 keeps the entropy of t*f
// finite}. With an explicit t only that scaling is probed; by default t=1.5
// is tried first and 1.1 as fallback.
GrowthRecord growth_membership(const EntropyModel& model, const GridFunction& f,
                               std::optional<double> t = std::nullopt);

// Entropy of f restricted to {f >= m} (masked to -inf elsewhere) along an
// increasing m-ladder; passes when the sequence ends below `floor`.
// Requires f in the growth class.
CheckReport check_tail_lemma(const EntropyModel& model, const GridFunction& f,
                             const std::vector<double>& m_ladder, double floor_value = -10.0);

// |upper entropy of f - convex integral of f against the upper capacity
// concentration| <= tol. Requires a continuous tag and growth membership.
CheckReport check_representation(const EntropyModel& model, const GridFunction& f, double tol);

// Largest-term inequalities for a family of positive sequences given in log
// scale (generator i maps n to log a_i(n)):
//   window-max (1/n) log sum_i a_i(n) <= max_i window-max (1/n) log a_i(n),
//   window-min (1/n) log sum_i a_i(n) <= max(window-min of a_1, window-max of the rest),
// both up to tol.
CheckReport check_largest_term(const std::vector<std::function<double(int)>>& log_sequences,
                               const std::vector<int>& n_ladder, int tail_window, double tol);

}  // namespace ratelab
