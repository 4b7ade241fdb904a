#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ratelab/catalog.hpp"
#include "ratelab/entropy.hpp"
#include "ratelab/grid.hpp"
#include "support/oracles.hpp"

using namespace ratelab;
using namespace testsupport;

namespace {

GridFunction linear_fn(const GridSpace& s, double y) {
  return GridFunction::from_fn(s, [y](const std::vector<double>& x) { return y * x[0]; });
}

GridFunction invv_fn(const GridSpace& s, double a) {
  return GridFunction::from_fn(
      s, [a](const std::vector<double>& x) { return std::abs(a) - 2.0 * std::abs(x[0] - a); });
}

}  // namespace

TEST_CASE("model construction validates its ladder") {
  const GridSpace s = GridSpace::discrete_line(3);
  auto per_n = [](const GridFunction&, int) { return ExtendedValue(0.0); };
  CHECK_THROWS_AS(EntropyModel("m", s, nullptr, {}, {4, 8}, 1), std::invalid_argument);
  CHECK_THROWS_AS(EntropyModel("m", s, per_n, {}, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(EntropyModel("m", s, per_n, {}, {4, 4}, 1), std::invalid_argument);
  CHECK_THROWS_AS(EntropyModel("m", s, per_n, {}, {8, 4}, 1), std::invalid_argument);
  CHECK_THROWS_AS(EntropyModel("m", s, per_n, {}, {-4, 8}, 1), std::invalid_argument);
  CHECK_THROWS_AS(EntropyModel("m", s, per_n, {}, {4, 8}, 3), std::invalid_argument);
  CHECK_THROWS_AS(EntropyModel("m", s, per_n, {}, {4, 8}, 0), std::invalid_argument);

  const EntropyModel m("m", s, per_n, {}, {4, 8, 16}, 2);
  CHECK(m.id() == "m");
  CHECK(m.n_ladder() == std::vector<int>{4, 8, 16});
  CHECK(m.tail_window() == 2);
  CHECK(!m.has_capacity());
  CHECK_THROWS_AS(m.log_capacity(PointSet::all(s), 4), std::logic_error);
  CHECK_THROWS_AS(m.per_n_entropy(GridFunction::constant(s, 0.0), 0), std::invalid_argument);
  CHECK_THROWS_AS(
      m.per_n_entropy(GridFunction::constant(GridSpace::discrete_line(4), 0.0), 4),
      std::invalid_argument);

  const EntropyModel m2 = m.with_ladder({2, 4}, 1);
  CHECK(m2.n_ladder() == std::vector<int>{2, 4});
  CHECK(m2.tail_window() == 1);
  CHECK(m2.id() == "m");
}

TEST_CASE("per-scale entropies of linear functions match the closed forms") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();

  for (double y : {0.0, 0.25, -0.25, 0.5, -0.5, 0.75, 0.9, -0.9}) {
    const GridFunction f = linear_fn(s, y);
    for (int n : model.n_ladder()) {
      const ExtendedValue got = entropy_at(model, f, n);
      const ExtendedValue want = laplace_linear_psi_n(y, n);
      REQUIRE(got.is_finite());
      CHECK(got.value() == doctest::Approx(want.value()).epsilon(1e-12));
    }
  }

  // the value singled out for scale 8 and slope 1/2: log(4/3)/8
  CHECK(entropy_at(model, linear_fn(s, 0.5), 8).value() ==
        doctest::Approx(std::log(4.0 / 3.0) / 8.0).epsilon(1e-13));

  // slopes at or past the tail rate diverge
  for (double y : {1.0, -1.0, 1.2, -3.0}) {
    CHECK(entropy_at(model, linear_fn(s, y), 64).is_pos_inf());
  }
}

TEST_CASE("per-scale entropies of tent functions match the closed form") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();
  for (double a : {0.5, 1.0, 2.0, -1.0, -0.5}) {
    const GridFunction f = invv_fn(s, a);
    for (int n : model.n_ladder()) {
      CHECK(entropy_at(model, f, n).value() ==
            doctest::Approx(laplace_invv_psi_n(a, n)).epsilon(1e-11));
    }
  }
}

TEST_CASE("gaussian linear entropies are exact at every scale") {
  for (double m : {0.0, 1.0, -0.5}) {
    const std::string id = m == 0.0 ? "gaussian" : "gaussian(" + std::to_string(m) + ")";
    const EntropyModel model = make_model(id);
    for (double y : {0.0, 0.5, -0.5, 1.0, 2.0, -1.5}) {
      const GridFunction f = linear_fn(model.space(), y);
      for (int n : model.n_ladder()) {
        CHECK(entropy_at(model, f, n).value() ==
              doctest::Approx(gaussian_linear_psi_n(m, y)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("entropy is translation equivariant and monotone") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();
  const GridFunction f = linear_fn(s, 0.5);
  for (int n : {4, 64, 256}) {
    const double base = entropy_at(model, f, n).value();
    CHECK(entropy_at(model, add_const(f, 1.25), n).value() ==
          doctest::Approx(base + 1.25).epsilon(1e-11));
    // f <= f + 1.25, and capping from above can only shrink the value
    CHECK(entropy_at(model, min_with_const(f, 0.25), n).value() <= base + 1e-12);
  }

  // identically -inf functions have entropy -inf
  const GridFunction nothing = mask(f, PointSet::none(s));
  CHECK(entropy_at(model, nothing, 16).is_neg_inf());
}

TEST_CASE("asymptotic records summarize the tail window") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();

  const AsymptoticRecord conv = asymptotic_entropy(model, linear_fn(s, 0.5));
  REQUIRE(conv.lower.is_finite());
  CHECK(conv.converged);
  CHECK(!conv.diverged);
  CHECK(conv.lower <= conv.upper);
  // window = {64, 128, 256}: min at n = 256, max at n = 64
  CHECK(conv.lower.value() == doctest::Approx(-std::log1p(-0.25) / 256).epsilon(1e-10));
  CHECK(conv.upper.value() == doctest::Approx(-std::log1p(-0.25) / 64).epsilon(1e-10));

  const AsymptoticRecord div = asymptotic_entropy(model, linear_fn(s, 1.2));
  CHECK(div.diverged);
  CHECK(div.upper.is_pos_inf());
  CHECK(!div.converged);

  const AsymptoticRecord empty =
      asymptotic_entropy(model, mask(linear_fn(s, 0.5), PointSet::none(s)));
  CHECK(empty.converged);
  CHECK(empty.lower.is_neg_inf());
  CHECK(empty.upper.is_neg_inf());

  const json j = conv.to_json();
  CHECK(j["proxy"] == "tail-window");
  CHECK(j["converged"] == true);
}

TEST_CASE("growth membership probes scalings past one") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();

  // slope 0.9: 1.5x the slope diverges, but the 1.1 fallback stays finite
  const GridFunction f = linear_fn(s, 0.9);
  const GrowthRecord forced = growth_membership(model, f, 1.5);
  CHECK(!forced.in_class);
  CHECK(forced.witness_t == 1.5);
  const GrowthRecord fallback = growth_membership(model, f);
  CHECK(fallback.in_class);
  CHECK(fallback.witness_t == 1.1);

  // slope 0.5 passes at the first attempt
  const GrowthRecord easy = growth_membership(model, linear_fn(s, 0.5));
  CHECK(easy.in_class);
  CHECK(easy.witness_t == 1.5);

  // slope 1.5 diverges at any admissible scaling
  CHECK(!growth_membership(model, linear_fn(s, 1.5)).in_class);

  CHECK_THROWS_AS(growth_membership(model, f, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(growth_membership(model, f, 0.5), std::invalid_argument);
}

TEST_CASE("masked tails fall below any floor for admissible functions") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();

  const CheckReport r =
      check_tail_lemma(model, linear_fn(s, 0.5), {0.5, 1.0, 2.0, 4.0, 8.0, 16.0});
  CHECK(r.pass);
  CHECK(r.worst_violation <= 1e-9);
  CHECK(r.proxy == "tail-window");
  REQUIRE(r.details["masked_entropies"].size() == 6);

  // constants drop to -inf as soon as the mask empties
  const CheckReport flat = check_tail_lemma(model, GridFunction::constant(s, 0.0), {1.0, 2.0});
  CHECK(flat.pass);

  const CheckReport gauss = check_tail_lemma(make_model("gaussian"),
                                             linear_fn(make_model("gaussian").space(), 1.0),
                                             {1.0, 2.0, 4.0, 8.0});
  CHECK(gauss.pass);

  CHECK_THROWS_AS(check_tail_lemma(model, linear_fn(s, 0.5), {}), std::invalid_argument);
  CHECK_THROWS_AS(check_tail_lemma(model, linear_fn(s, 0.5), {2.0, 1.0}), std::invalid_argument);
  // growth hypothesis is a hard precondition
  CHECK_THROWS_AS(check_tail_lemma(model, linear_fn(s, 1.5), {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("the numeric representation ties entropies to the capacity integral") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();

  const CheckReport tent = check_representation(model, invv_fn(s, 1.0), 2e-2);
  CHECK(tent.pass);

  const CheckReport flat = check_representation(model, GridFunction::constant(s, 0.75), 1e-9);
  CHECK(flat.pass);
  CHECK(flat.worst_violation <= 1e-12);

  const EntropyModel gauss = make_model("gaussian");
  const CheckReport lin = check_representation(gauss, linear_fn(gauss.space(), 1.0), 2e-2);
  CHECK(lin.pass);

  // preconditions: continuous tag and growth membership
  const GridFunction untagged(s, GridFunction::constant(s, 0.0).values(),
                              Regularity::measurable);
  CHECK_THROWS_AS(check_representation(model, untagged, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(check_representation(model, linear_fn(s, 1.5), 1e-2), std::invalid_argument);
}

TEST_CASE("largest-term inequalities hold for exponential sequences") {
  const std::vector<int> ladder = {4, 8, 16, 32, 64, 128, 256};
  std::vector<std::function<double(int)>> seqs;
  seqs.push_back([](int n) { return 0.3 * n; });
  seqs.push_back([](int n) { return 0.1 * n; });
  seqs.push_back([](int n) { return -0.5 * n; });
  const CheckReport r = check_largest_term(seqs, ladder, 3, 2e-2);
  CHECK(r.pass);
  CHECK(r.proxy == "tail-window");

  std::vector<std::function<double(int)>> decay;
  decay.push_back([](int n) { return -0.1 * n; });
  decay.push_back([](int n) { return -0.5 * n; });
  CHECK(check_largest_term(decay, ladder, 3, 2e-2).pass);

  CHECK_THROWS_AS(check_largest_term({}, ladder, 3, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(check_largest_term(seqs, ladder, 9, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(check_largest_term(seqs, {}, 1, 1e-2), std::invalid_argument);
}

TEST_CASE("entropy respects domination by finite maxima of a family") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();
  const GridFunction g1 = linear_fn(s, 0.3);
  const GridFunction g2 = linear_fn(s, -0.4);
  const GridFunction f = min_with_const(pointwise_max(g1, g2), 0.2);

  const AsymptoticRecord rf = asymptotic_entropy(model, f);
  const AsymptoticRecord r1 = asymptotic_entropy(model, g1);
  const AsymptoticRecord r2 = asymptotic_entropy(model, g2);
  REQUIRE(rf.upper.is_finite());
  CHECK(rf.upper.value() <=
        std::max(r1.upper.value(), r2.upper.value()) + 2e-2);
  // lower proxy never exceeds the upper proxy
  CHECK(rf.lower <= rf.upper);
  CHECK(r1.lower <= r1.upper);
}

TEST_CASE("capacities exponentiate the masked-indicator entropies") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();
  const PointSet a = lattice_ball(s, {1.0}, 0.5);
  for (int n : {4, 64, 256}) {
    const ExtendedValue masked =
        entropy_at(model, mask(GridFunction::constant(s, 0.0), a), n);
    REQUIRE(masked.is_finite());
    CHECK(model.log_capacity(a, n) == doctest::Approx(n * masked.value()).epsilon(1e-10));
    CHECK(model.capacity(a, n) ==
          doctest::Approx(std::exp(model.log_capacity(a, n))).epsilon(1e-12));
  }
}
