#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ratelab/convex_integral.hpp"
#include "ratelab/entropy.hpp"
#include "ratelab/grid.hpp"
#include "ratelab/report.hpp"

namespace ratelab {

// A finite parametric family of real-valued continuous test functions.
// Spec-string grammar (1-d):
//   linear:ymin,ymax,step   members x -> y*x
//   invv:amin,amax,step     members x -> |a| - 2|x - a|
//   custom:<file>           JSON {"params": [[..]..], "values": [[..]..]}
//                           with one value row per member, one entry per
//                           grid point in flat order
// Parameters are materialized as lower + k*step so families sharing a
// formula with the grid line up bitwise with grid coordinates.
class TestingFamily {
 public:
  enum class Kind { linear, inverted_v, custom };
  using Eval = std::function<double(const std::vector<double>& param, const std::vector<double>& x)>;

  static TestingFamily linear(double ymin, double ymax, double step);
  static TestingFamily inverted_v(double amin, double amax, double step);
  static TestingFamily custom(std::vector<std::vector<double>> params, Eval eval,
                              std::string spec_string = "custom:<inline>");

  Kind kind() const { return kind_; }
  std::size_t size() const { return params_.size(); }
  const std::vector<double>& param(std::size_t i) const { return params_.at(i); }
  const std::vector<std::vector<double>>& params() const { return params_; }
  double eval(std::size_t i, const std::vector<double>& x) const;
  GridFunction member(const GridSpace& space, std::size_t i) const;
  const std::string& spec_string() const { return spec_; }

 private:
  TestingFamily(Kind kind, std::vector<std::vector<double>> params, Eval eval, std::string spec);

  Kind kind_;
  std::vector<std::vector<double>> params_;
  Eval eval_;
  std::string spec_;
};

TestingFamily parse_family(const std::string& spec, const GridSpace& space);

// Per-member asymptotic entropy and growth-class records for a family.
// Inverted-v members are evaluated on a working box padded so their peaks sit
// strictly inside: a peak on the box edge would otherwise have its rising
// segment extended onto the tail cell and report spurious divergence. Linear
// members extend exactly and custom tables cannot leave their grid, so both
// are evaluated on the model's own box.
struct MemberRecord {
  AsymptoticRecord entropy;
  GrowthRecord growth;
};

std::vector<MemberRecord> member_records(const EntropyModel& model, const TestingFamily& h);

struct ConjugateStats {
  std::size_t members = 0;
  std::size_t skipped_infinite = 0;  // members whose entropy is +inf
};

// Conjugate rate psi*(x) = sup over members of {f(x) - psi(f)}. Members
// with psi = +inf drop out of the sup (counted in stats). The raw sup is
// reported: negative floating-point dust (>= -1e-9) snaps to 0, anything
// genuinely negative throws, so no silent clamping occurs.
RateField conjugate_rate(const GridSpace& space, const TestingFamily& h,
                         const std::vector<ExtendedValue>& psi_values,
                         ConjugateStats* stats = nullptr);

// Same, with psi taken as the upper asymptotic entropy of each member
// under the model (diverged members are skipped).
RateField conjugate_rate(const EntropyModel& model, const TestingFamily& h,
                         ConjugateStats* stats = nullptr);

// Grid-certified exposed points. A point x is exposed by member f when
// d(z) = rate(z) - f(z) has its unique minimum over the grid at z = x,
// with d(z) - d(x) >= margin whenever ||z - x|| >= radius (inside the
// radius only strict positivity is required). `nice` additionally needs
// the member's entropy record converged and its growth check passing.
struct ExposedSet {
  GridSpace space;
  std::vector<char> exposed;
  std::vector<char> nice;
  std::vector<int> member;                    // family index, -1 if not exposed
  std::vector<std::vector<double>> param;     // member parameter, empty if not exposed
  double margin = 0.0;
  double radius = 0.0;

  explicit ExposedSet(GridSpace s);
  std::size_t count_exposed() const;
  PointSet as_point_set() const;
};

// Ties are broken toward the lexicographically smallest exposing parameter.
ExposedSet detect_exposed(const EntropyModel& model, const TestingFamily& h,
                          const RateField& rate, double margin, double radius);

// Variant with externally supplied member records (e.g. closed-form
// entropies); records drive only the niceness flags.
ExposedSet detect_exposed(const TestingFamily& h, const RateField& rate,
                          const std::vector<MemberRecord>& records, double margin,
                          double radius);

// For every lattice ball O (all centers x all radii): inf over O of the
// rate must match inf over O intersect exposed within tol; an empty
// intersection scores +inf and fails.
CheckReport check_richness(const RateField& rate, const ExposedSet& exposed,
                           const std::vector<double>& ball_radii, double tol);

// For a family with exactly one member per grid point (param = coordinates):
// checks psi_upper(f_x) = psi_lower(f_x) = 0 within tol and the strictness
// f_x(y) < sup_a f_a(y) for y != x; on pass, also asserts that the
// conjugate with zero entropies equals the pointwise family sup.
CheckReport exposing_family_check(const EntropyModel& model, const TestingFamily& h,
                                  double tol);

}  // namespace ratelab
