#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "ratelab/catalog.hpp"
#include "ratelab/concentration.hpp"
#include "ratelab/convex_integral.hpp"
#include "ratelab/grid.hpp"
#include "ratelab/testing_family.hpp"
#include "support/oracles.hpp"

using namespace ratelab;
using namespace testsupport;

namespace {

// f_a(x) = a x - a^2 / 2, indexed by every grid point a.
TestingFamily quadratic_exposing_family(const GridSpace& space) {
  std::vector<std::vector<double>> params;
  params.reserve(space.size());
  for (std::size_t flat = 0; flat < space.size(); ++flat) params.push_back(space.point(flat));
  return TestingFamily::custom(
      params,
      [](const std::vector<double>& p, const std::vector<double>& x) {
        return p[0] * x[0] - p[0] * p[0] / 2.0;
      },
      "custom:<xy-x^2/2>");
}

}  // namespace

TEST_CASE("family factories materialize aligned parameters") {
  const TestingFamily lin = TestingFamily::linear(-0.9, 0.9, 0.1);
  CHECK(lin.kind() == TestingFamily::Kind::linear);
  REQUIRE(lin.size() == 19);
  CHECK(lin.param(0) == std::vector<double>{-0.9});
  CHECK(lin.param(18)[0] == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(lin.eval(9, {2.0}) == doctest::Approx((-0.9 + 9 * 0.1) * 2.0));

  const TestingFamily tent = TestingFamily::inverted_v(-2.0, 2.0, 0.5);
  CHECK(tent.kind() == TestingFamily::Kind::inverted_v);
  REQUIRE(tent.size() == 9);
  // f_a(x) = |a| - 2 |x - a|
  CHECK(tent.eval(8, {1.0}) == doctest::Approx(2.0 - 2.0));
  CHECK(tent.eval(0, {-2.0}) == doctest::Approx(2.0));

  const GridSpace s = GridSpace::line(-3.0, 3.0, 121);
  const GridFunction m = tent.member(s, 4);  // a = 0
  CHECK(m.regularity() == Regularity::continuous);
  CHECK(m.value(s.index_of_point({1.0})).value() == doctest::Approx(-2.0));

  // the family grid and the space grid share the same materialization
  const TestingFamily aligned = TestingFamily::inverted_v(-3.0, 3.0, 0.05);
  REQUIRE(aligned.size() == 121);
  for (std::size_t i = 0; i < aligned.size(); ++i) {
    CHECK(aligned.param(i)[0] == s.coord(i, 0));  // bitwise
  }
}

TEST_CASE("family spec strings parse and validate") {
  const GridSpace s = GridSpace::line(-3.0, 3.0, 121);
  CHECK(parse_family("linear:-0.9,0.9,0.1", s).size() == 19);
  CHECK(parse_family("invv:-2,2,0.5", s).size() == 9);
  CHECK(parse_family("linear:0.5,0.5,0.1", s).size() == 1);

  CHECK_THROWS_AS(parse_family("linear:1,2", s), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("linear:1,2,0", s), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("linear:2,1,0.5", s), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("linear:a,b,c", s), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("bogus:1,2,3", s), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("custom:/nonexistent/file.json", s), std::invalid_argument);

  const GridSpace q({0.0, 0.0}, {1.0, 1.0}, {2, 2});
  CHECK_THROWS_AS(parse_family("linear:0,1,0.5", q), std::invalid_argument);
}

TEST_CASE("custom families load from a JSON table") {
  const GridSpace s = GridSpace::discrete_line(3);
  const std::string path = "/tmp/ratelab_custom_family.json";
  {
    std::ofstream out(path);
    out << R"({"params": [[0.0], [1.0]],
               "values": [[0.0, -1.0, -2.0], [5.0, 4.0, 3.0]]})";
  }
  const TestingFamily fam = parse_family("custom:" + path, s);
  REQUIRE(fam.size() == 2);
  CHECK(fam.kind() == TestingFamily::Kind::custom);
  CHECK(fam.eval(0, {1.0}) == -1.0);
  CHECK(fam.eval(1, {2.0}) == 3.0);
  CHECK(fam.member(s, 1).value(0).value() == 5.0);
  CHECK(fam.spec_string() == "custom:" + path);

  {
    std::ofstream out(path);
    out << R"({"params": [[0.0]], "values": [[1.0, 2.0]]})";  // wrong row width
  }
  CHECK_THROWS_AS(parse_family("custom:" + path, s), std::invalid_argument);
  {
    std::ofstream out(path);
    out << R"({"params": [[0.0], [0.0]],
               "values": [[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]})";  // duplicate params
  }
  CHECK_THROWS_AS(parse_family("custom:" + path, s), std::invalid_argument);
  {
    std::ofstream out(path);
    out << "not json";
  }
  CHECK_THROWS_AS(parse_family("custom:" + path, s), std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("analytic conjugates of aligned tent families are exact") {
  const GridSpace s = GridSpace::line(-3.0, 3.0, 121);
  const TestingFamily fam = parse_family("invv:-3,3,0.05", s);
  const std::vector<ExtendedValue> zeros(fam.size(), ExtendedValue(0.0));
  ConjugateStats stats;
  const RateField rate = conjugate_rate(s, fam, zeros, &stats);
  CHECK(stats.members == fam.size());
  CHECK(stats.skipped_infinite == 0);
  CHECK(rate.provenance() == RateField::Provenance::conjugate);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    CHECK(rate.value(flat).value() == std::abs(s.coord(flat, 0)));  // bitwise
  }
}

TEST_CASE("analytic conjugates of capped linear families are exact") {
  const GridSpace s = GridSpace::line(-3.0, 3.0, 121);
  const TestingFamily fam = parse_family("linear:-0.95,0.95,0.05", s);
  const std::vector<ExtendedValue> zeros(fam.size(), ExtendedValue(0.0));
  const RateField rate = conjugate_rate(s, fam, zeros);
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    CHECK(rate.value(flat).value() ==
          doctest::Approx(0.95 * std::abs(s.coord(flat, 0))).epsilon(1e-14));
  }
}

TEST_CASE("model-driven conjugates skip divergent members") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const TestingFamily fam = parse_family("linear:-1.2,1.2,0.2", model.space());
  REQUIRE(fam.size() == 13);
  ConjugateStats stats;
  const RateField rate = conjugate_rate(model, fam, &stats);
  CHECK(stats.members == 13);
  CHECK(stats.skipped_infinite == 4);  // slopes -1.2, -1, 1, 1.2

  // the surviving slopes reach 0.8|x| up to the window entropy shift
  const GridSpace& s = model.space();
  for (double x : {0.0, 1.0, -2.0, 3.0}) {
    const double got = rate.value(s.index_of_point({x})).value();
    CHECK(std::abs(got - 0.8 * std::abs(x)) <= 5e-2);
  }
}

TEST_CASE("conjugate construction rejects bad entropy vectors") {
  const GridSpace s = GridSpace::line(-1.0, 1.0, 11);
  const TestingFamily one = TestingFamily::linear(0.0, 0.0, 0.1);
  REQUIRE(one.size() == 1);

  CHECK_THROWS_AS(conjugate_rate(s, one, {}), std::invalid_argument);
  CHECK_THROWS_AS(conjugate_rate(s, one, {ExtendedValue::neg_inf()}), std::invalid_argument);
  // the only member diverges: no finite sup exists anywhere
  CHECK_THROWS_AS(conjugate_rate(s, one, {ExtendedValue::pos_inf()}), std::domain_error);
  // a positive entropy drives the conjugate of the zero member negative
  CHECK_THROWS_AS(conjugate_rate(s, one, {ExtendedValue(5.0)}), std::domain_error);

  const TestingFamily none = TestingFamily::custom(
      {}, [](const std::vector<double>&, const std::vector<double>&) { return 0.0; });
  CHECK_THROWS_AS(conjugate_rate(s, none, {}), std::invalid_argument);
}

TEST_CASE("exposed-point detection certifies the linear family at the origin") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const GridSpace& s = model.space();
  const TestingFamily fam = parse_family("linear:-0.9,0.9,0.1", s);
  const RateField rate = RateField::from_fn(
      s, [](const std::vector<double>& x) { return ExtendedValue(std::abs(x[0])); },
      RateField::Provenance::analytic);

  const double radius = 2 * s.max_step();
  const ExposedSet exposed = detect_exposed(model, fam, rate, 1e-4, radius);
  CHECK(exposed.count_exposed() == 1);
  const std::size_t origin = s.index_of_point({0.0});
  CHECK(exposed.exposed[origin] == 1);
  // the winning member's tail window has not settled, so it is not "nice"
  CHECK(exposed.nice[origin] == 0);
  // ties broken toward the lexicographically smallest exposing slope
  CHECK(exposed.param[origin] == std::vector<double>{-0.9});
  CHECK(exposed.as_point_set().indices() == std::vector<std::size_t>{origin});

  // externally supplied records drive the niceness flags directly
  std::vector<MemberRecord> vouched(fam.size());
  for (MemberRecord& rec : vouched) {
    rec.entropy.converged = true;
    rec.growth.in_class = true;
  }
  const ExposedSet exposed_r = detect_exposed(fam, rate, vouched, 1e-4, radius);
  CHECK(exposed_r.count_exposed() == 1);
  CHECK(exposed_r.nice[origin] == 1);

  // richness fails: balls away from the origin never meet the exposed set
  const CheckReport rich = check_richness(rate, exposed, {radius, 2 * radius}, 1e-9);
  CHECK(!rich.pass);
  CHECK(std::isinf(rich.worst_violation));
}

TEST_CASE("exposed-point detection certifies every point for the tent family") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const GridSpace& s = model.space();
  const TestingFamily fam = parse_family("invv:-3,3,0.05", s);
  const std::vector<ExtendedValue> zeros(fam.size(), ExtendedValue(0.0));
  const RateField rate = conjugate_rate(s, fam, zeros);

  const ExposedSet exposed = detect_exposed(model, fam, rate, 1e-4, 2 * s.max_step());
  CHECK(exposed.count_exposed() == s.size());
  const std::size_t origin = s.index_of_point({0.0});
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    CHECK(exposed.exposed[flat] == 1);
    // the a=0 member's entropy window is still drifting; all others settle
    CHECK(exposed.nice[flat] == (flat == origin ? 0 : 1));
    CHECK(exposed.param[flat][0] == s.coord(flat, 0));
  }

  const CheckReport rich =
      check_richness(rate, exposed, {2 * s.max_step(), 8 * s.max_step()}, 1e-9);
  CHECK(rich.pass);
  CHECK(rich.worst_violation == 0.0);

  // the exposed set is insensitive to constant shifts of the rate
  std::vector<ExtendedValue> shifted;
  for (std::size_t flat = 0; flat < s.size(); ++flat)
    shifted.push_back(rate.value(flat) + ExtendedValue(0.7));
  const RateField rate2(s, shifted, RateField::Provenance::analytic);
  const ExposedSet exposed2 = detect_exposed(model, fam, rate2, 1e-4, 2 * s.max_step());
  CHECK(exposed2.count_exposed() == s.size());
}

TEST_CASE("exposed-point detection for a linear family against a quadratic rate") {
  const EntropyModel model = make_model("gaussian");
  const GridSpace& s = model.space();
  const TestingFamily fam = parse_family("linear:-2,2,0.2", s);
  const RateField rate = RateField::from_fn(
      s, [](const std::vector<double>& x) { return ExtendedValue(x[0] * x[0] / 2.0); },
      RateField::Provenance::analytic);

  const ExposedSet exposed = detect_exposed(model, fam, rate, 1e-4, 2 * s.max_step());
  CHECK(exposed.count_exposed() == fam.size());  // one point per slope
  for (std::size_t i = 0; i < fam.size(); ++i) {
    const std::size_t flat = s.index_of_point({fam.param(i)[0]});
    CHECK(exposed.exposed[flat] == 1);
    // quadratic-model entropies of linear members are n-independent, so
    // every record converges and every exposing member is "nice"
    CHECK(exposed.nice[flat] == 1);
  }
}

TEST_CASE("detection validates margin, radius, and records") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const GridSpace& s = model.space();
  const TestingFamily fam = parse_family("linear:-0.5,0.5,0.5", s);
  const RateField rate = RateField::from_fn(
      s, [](const std::vector<double>& x) { return ExtendedValue(std::abs(x[0])); },
      RateField::Provenance::analytic);

  CHECK_THROWS_AS(detect_exposed(model, fam, rate, 0.0, 2 * s.max_step()),
                  std::invalid_argument);
  CHECK_THROWS_AS(detect_exposed(model, fam, rate, 1e-4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(detect_exposed(fam, rate, {}, 1e-4, 2 * s.max_step()),
                  std::invalid_argument);

  const ExposedSet exposed = detect_exposed(model, fam, rate, 1e-4, 2 * s.max_step());
  CHECK_THROWS_AS(check_richness(rate, exposed, {}, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(check_richness(rate, exposed, {-0.1}, 1e-9), std::invalid_argument);
}

TEST_CASE("an aligned tent family is an exposing family for the laplace model") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const CheckReport r =
      exposing_family_check(model, parse_family("invv:-3,3,0.05", model.space()), 2e-2);
  CHECK(r.pass);
}

TEST_CASE("the quadratic family is an exposing family for the gaussian model") {
  const EntropyModel model = make_model("gaussian");
  const CheckReport r = exposing_family_check(model, quadratic_exposing_family(model.space()), 2e-2);
  CHECK(r.pass);
}

TEST_CASE("a flat family is not an exposing family") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const GridSpace& s = model.space();
  std::vector<std::vector<double>> params;
  for (std::size_t flat = 0; flat < s.size(); ++flat) params.push_back(s.point(flat));
  const TestingFamily flat = TestingFamily::custom(
      params, [](const std::vector<double>&, const std::vector<double>&) { return 0.0; },
      "custom:<flat>");
  const CheckReport r = exposing_family_check(model, flat, 2e-2);
  CHECK(!r.pass);

  // wrong arity: one member per point is a hard requirement
  const TestingFamily two = TestingFamily::linear(0.0, 0.1, 0.1);
  CHECK_THROWS_AS(exposing_family_check(model, two, 2e-2), std::invalid_argument);
}

TEST_CASE("the conjugate never exceeds the minimal rate of the upper capacity limit") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const GridSpace& s = model.space();
  const TestingFamily fam = parse_family("invv:-3,3,0.05", s);
  const RateField conj = conjugate_rate(model, fam);
  const RateField minimal =
      minimal_rate(capacity_limit_concentration(model, CapacityMode::upper));
  for (std::size_t flat = 0; flat < s.size(); ++flat) {
    REQUIRE(minimal.value(flat).is_finite());
    // slack covers the half-cell mass gain of point capacities plus the
    // finite-n window shift of the member entropies
    CHECK(conj.value(flat).value() <= minimal.value(flat).value() + 5e-2);
  }
}

TEST_CASE("the robust two-gaussian conjugate collapses to the convex hull") {
  const EntropyModel model = make_model("robust:gaussian(1),gaussian(-1)");
  const GridSpace& s = model.space();
  const TestingFamily fam = parse_family("linear:-3,3,0.1", s);
  const RateField conj = conjugate_rate(model, fam);

  auto hull = [](double x) {
    const double t = std::max(std::abs(x) - 1.0, 0.0);
    return t * t / 2.0;
  };
  auto true_rate = [](double x) {
    return std::min((x - 1.0) * (x - 1.0) / 2.0, (x + 1.0) * (x + 1.0) / 2.0);
  };

  for (double x : {0.0, 0.5, -0.5, 1.0, 1.5, 2.0, -2.5}) {
    const double got = conj.value(s.index_of_point({x})).value();
    CHECK(std::abs(got - hull(x)) <= 1e-2);
  }

  // inside (-1, 1) the convex conjugate provably misses the two-well rate
  const double at_half = conj.value(s.index_of_point({0.5})).value();
  CHECK(at_half <= 1e-9);
  CHECK(true_rate(0.5) - at_half >= 0.05);
}
