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

}  // namespace

TEST_CASE("model id grammar") {
  CHECK(is_known_model_id("laplace"));
  CHECK(is_known_model_id("gaussian"));
  CHECK(is_known_model_id("gaussian(1)"));
  CHECK(is_known_model_id("gaussian(-0.5)"));
  CHECK(is_known_model_id("robust:laplace,gaussian"));
  CHECK(is_known_model_id("robust:gaussian(1),gaussian(-1)"));
  CHECK(is_known_model_id(" laplace "));

  CHECK(!is_known_model_id("weibull"));
  CHECK(!is_known_model_id(""));
  CHECK(!is_known_model_id("gaussian("));
  CHECK(!is_known_model_id("gaussian(a)"));
  CHECK(!is_known_model_id("robust:laplace"));
  CHECK(!is_known_model_id("robust:laplace,,gaussian"));
  CHECK(!is_known_model_id("robust:"));

  CHECK_THROWS_AS(make_model("weibull"), std::invalid_argument);
  CHECK_THROWS_AS(make_model("robust:laplace"), std::invalid_argument);
}

TEST_CASE("default boxes depend on the component tails") {
  const GridSpace lap = default_box("laplace");
  CHECK(lap.lower(0) == -3.0);
  CHECK(lap.upper(0) == 3.0);
  CHECK(lap.points(0) == 601);

  const GridSpace gau = default_box("gaussian");
  CHECK(gau.lower(0) == -4.0);
  CHECK(gau.upper(0) == 4.0);
  CHECK(gau.points(0) == 401);

  // any gaussian component pushes the box out to the gaussian default
  const GridSpace mix = default_box("robust:laplace,gaussian");
  CHECK(mix.lower(0) == -4.0);
  CHECK(mix.points(0) == 401);
}

TEST_CASE("model construction validates the box") {
  CHECK_THROWS_AS(make_model("laplace", GridSpace::line(-2.0, 3.0, 101)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_model("gaussian", GridSpace::line(-3.5, 3.5, 101)),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_model("gaussian(2)", GridSpace::line(-4.0, 4.0, 101)),
                  std::invalid_argument);  // mean 2 needs upper >= 5
  CHECK_THROWS_AS(make_model("laplace", GridSpace::discrete_line(10)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      make_model("laplace", GridSpace({-3.0, -3.0}, {3.0, 3.0}, {10, 10})),
      std::invalid_argument);

  // a larger box than the default is fine
  const EntropyModel wide = make_model("laplace", GridSpace::line(-5.0, 5.0, 501));
  CHECK(wide.space().points(0) == 501);
  CHECK(wide.id() == "laplace");
}

TEST_CASE("every model normalizes to unit mass on its ladder") {
  for (const char* id : {"laplace", "gaussian", "gaussian(1)", "robust:laplace,gaussian",
                         "robust:gaussian(1),gaussian(-1)"}) {
    const EntropyModel model = make_model(id);
    const PointSet all = PointSet::all(model.space());
    for (int n : model.n_ladder()) {
      CHECK(std::abs(model.log_capacity(all, n)) <= 1e-9);
      CHECK(model.capacity(all, n) == doctest::Approx(1.0).epsilon(1e-9));
    }
    // and the zero function has zero entropy exactly
    const ExtendedValue z = entropy_at(model, GridFunction::constant(model.space(), 0.0), 256);
    REQUIRE(z.is_finite());
    CHECK(std::abs(z.value()) <= 1e-12);
  }
}

TEST_CASE("laplace capacities match closed-form interval masses") {
  const EntropyModel model = make_model("laplace");
  const GridSpace& s = model.space();
  const double h = s.step(0);

  auto interval = [&](double a, double b) {
    return PointSet::from_predicate(s, [=](const std::vector<double>& x) {
      return x[0] >= a - 1e-12 && x[0] <= b + 1e-12;
    });
  };

  // positive-side interval: cells tile [a - h/2, b + h/2]
  for (int n : model.n_ladder()) {
    CHECK(model.log_capacity(interval(1.0, 2.0), n) ==
          doctest::Approx(laplace_interval_log_capacity(1.0 - h / 2, 2.0 + h / 2, n))
              .epsilon(1e-12));
  }

  // interval straddling the origin: P = 1 - (e^{-n b'} + e^{n a'}) / 2
  for (int n : {4, 32, 256}) {
    const double a = -0.5 - h / 2, b = 0.25 + h / 2;
    const double want = std::log1p(-(std::exp(-n * b) + std::exp(n * a)) / 2.0);
    CHECK(model.log_capacity(interval(-0.5, 0.25), n) ==
          doctest::Approx(want).epsilon(1e-12));
  }

  // singletons own exactly one cell
  for (int n : {16, 256}) {
    const PointSet dot = lattice_ball(s, {1.0}, 0.0);
    CHECK(model.log_capacity(dot, n) ==
          doctest::Approx(laplace_interval_log_capacity(1.0 - h / 2, 1.0 + h / 2, n))
              .epsilon(1e-12));
  }
}

TEST_CASE("robust models take the exact max over their components") {
  const GridSpace box = GridSpace::line(-4.0, 4.0, 401);
  const EntropyModel robust = make_model("robust:laplace,gaussian", box);
  const EntropyModel lap = make_model("laplace", box);
  const EntropyModel gau = make_model("gaussian", box);

  for (double y : {0.0, 0.3, -0.6, 0.9}) {
    const GridFunction f = linear_fn(box, y);
    for (int n : {4, 64, 256}) {
      const ExtendedValue want =
          vmax(entropy_at(lap, f, n), entropy_at(gau, f, n));
      CHECK(entropy_at(robust, f, n).value() ==
            doctest::Approx(want.value()).epsilon(1e-12));
    }
  }

  // a slope that kills the laplace component alone must kill the max too
  CHECK(entropy_at(robust, linear_fn(box, 1.2), 64).is_pos_inf());

  const PointSet ball = lattice_ball(box, {2.0}, 0.5);
  for (int n : {16, 128}) {
    const double want = std::max(lap.log_capacity(ball, n), gau.log_capacity(ball, n));
    CHECK(robust.log_capacity(ball, n) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("the two-gaussian robust model has the absolute-moment entropy") {
  const EntropyModel model = make_model("robust:gaussian(1),gaussian(-1)");
  const GridSpace& s = model.space();
  for (double y : {0.0, 0.5, -0.5, 1.0, -2.0, 1.7}) {
    const GridFunction f = linear_fn(s, y);
    for (int n : model.n_ladder()) {
      CHECK(entropy_at(model, f, n).value() ==
            doctest::Approx(std::abs(y) + 0.5 * y * y).epsilon(1e-11));
    }
  }
}

TEST_CASE("tent entropies remain exact on custom boxes") {
  // the closed form has no grid content, so a coarser box must reproduce it
  const EntropyModel coarse = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  for (double a : {0.5, 1.0, -1.5}) {
    const GridFunction f = GridFunction::from_fn(
        coarse.space(),
        [a](const std::vector<double>& x) { return std::abs(a) - 2.0 * std::abs(x[0] - a); });
    for (int n : coarse.n_ladder()) {
      CHECK(entropy_at(coarse, f, n).value() ==
            doctest::Approx(laplace_invv_psi_n(a, n)).epsilon(1e-11));
    }
  }
}

TEST_CASE("custom ladders propagate through the model") {
  const EntropyModel model = make_model("laplace", default_box("laplace"), {2, 10, 50}, 2);
  CHECK(model.n_ladder() == std::vector<int>{2, 10, 50});
  CHECK(model.tail_window() == 2);
  const GridFunction f = linear_fn(model.space(), 0.5);
  CHECK(entropy_at(model, f, 10).value() ==
        doctest::Approx(-std::log1p(-0.25) / 10).epsilon(1e-12));
  const AsymptoticRecord rec = asymptotic_entropy(model, f);
  CHECK(rec.upper.value() == doctest::Approx(-std::log1p(-0.25) / 10).epsilon(1e-12));
  CHECK(rec.lower.value() == doctest::Approx(-std::log1p(-0.25) / 50).epsilon(1e-12));
}
