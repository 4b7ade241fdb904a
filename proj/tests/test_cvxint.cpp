#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "ratelab/catalog.hpp"
#include "ratelab/concentration.hpp"
#include "ratelab/convex_integral.hpp"
#include "ratelab/grid.hpp"
#include "support/oracles.hpp"

using namespace ratelab;
using namespace testsupport;

namespace {

Concentration maxplus3() {
  const GridSpace s = GridSpace::discrete_line(3);
  return maxplus_concentration(
      "demo", GridFunction(s, {ExtendedValue(0.0), ExtendedValue(-1.0), ExtendedValue(-2.0)},
                           Regularity::continuous));
}

}  // namespace

TEST_CASE("rate fields validate and snap their values") {
  const GridSpace s = GridSpace::discrete_line(3);
  CHECK_THROWS_AS(RateField(s, {ExtendedValue(0.0), ExtendedValue(1.0)},
                            RateField::Provenance::analytic),
                  std::invalid_argument);
  CHECK_THROWS_AS(RateField(s, {ExtendedValue(0.0), ExtendedValue::neg_inf(), ExtendedValue(1.0)},
                            RateField::Provenance::analytic),
                  std::invalid_argument);
  CHECK_THROWS_AS(RateField(s, {ExtendedValue(0.0), ExtendedValue(-1.0), ExtendedValue(1.0)},
                            RateField::Provenance::analytic),
                  std::invalid_argument);

  const RateField r(s, {ExtendedValue(-1e-12), ExtendedValue(2.0), ExtendedValue::pos_inf()},
                    RateField::Provenance::analytic);
  CHECK(r.value(0) == ExtendedValue(0.0));  // dust snaps to zero
  CHECK(r.value(2).is_pos_inf());
  CHECK(r.min_value() == ExtendedValue(0.0));
  CHECK(r.inf_over(PointSet::of(s, {1, 2})) == ExtendedValue(2.0));
  CHECK(r.inf_over(PointSet::of(s, {2})).is_pos_inf());
  CHECK(r.inf_over(PointSet::none(s)).is_pos_inf());
  CHECK(r.provenance() == RateField::Provenance::analytic);
}

TEST_CASE("the level-set scan reproduces the hand-computed example") {
  const Concentration j = maxplus3();
  const GridSpace& s = j.space();
  const GridFunction f(s, {ExtendedValue(1.0), ExtendedValue(5.0), ExtendedValue(10.0)});
  // sup over c of c + J({f >= c}): max(1 + 0, 5 - 1, 10 - 2) = 8
  CHECK(convex_integral(f, j) == ExtendedValue(8.0));

  CHECK(convex_integral(GridFunction::constant(s, 3.5), j) == ExtendedValue(3.5));
  CHECK(convex_integral(GridFunction::constant(s, -2.0), j) == ExtendedValue(-2.0));

  // masked indicators recover J itself
  for (const std::vector<std::size_t>& idx :
       {std::vector<std::size_t>{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}}) {
    const PointSet a = PointSet::of(s, idx);
    CHECK(convex_integral(mask(GridFunction::constant(s, 0.0), a), j) == j.eval(a));
  }

  const GridFunction allni(s, std::vector<ExtendedValue>(3, ExtendedValue::neg_inf()));
  CHECK(convex_integral(allni, j).is_neg_inf());

  const GridSpace other = GridSpace::discrete_line(4);
  CHECK_THROWS_AS(convex_integral(GridFunction::constant(other, 0.0), j),
                  std::invalid_argument);
}

TEST_CASE("the level-set scan agrees with the brute-force max-plus oracle") {
  std::mt19937_64 rng(31337);
  for (int rep = 0; rep < 300; ++rep) {
    const GridSpace s = random_discrete_space(rng);
    const GridFunction dens = random_dyadic_density(s, rng);
    const GridFunction f = random_dyadic_function(s, rng);
    const Concentration j = maxplus_concentration("rand", dens);
    CHECK(convex_integral(f, j) == brute_force_maxplus_integral(f, dens));
  }
}

TEST_CASE("sup of f minus rate applies the masking conventions") {
  const GridSpace s = GridSpace::discrete_line(3);
  const RateField i(s, {ExtendedValue(0.0), ExtendedValue(1.0), ExtendedValue::pos_inf()},
                    RateField::Provenance::analytic);
  const GridFunction f(s, {ExtendedValue(-1.0), ExtendedValue(5.0), ExtendedValue(100.0)});
  CHECK(sup_f_minus_rate(f, i) == ExtendedValue(4.0));  // the +inf rate point drops out

  const GridFunction g(s, {ExtendedValue::neg_inf(), ExtendedValue::neg_inf(), ExtendedValue(7.0)});
  CHECK(sup_f_minus_rate(g, i).is_neg_inf());  // only the excluded point is live
}

TEST_CASE("minimal rate on a discrete space recovers the negated density") {
  const GridSpace s = GridSpace::discrete_line(4);
  const GridFunction dens(s, {ExtendedValue(0.0), ExtendedValue(-0.5), ExtendedValue::neg_inf(),
                              ExtendedValue(-2.0)});
  const Concentration j = maxplus_concentration("rand", dens);
  const RateField i = minimal_rate(j);
  CHECK(i.provenance() == RateField::Provenance::minimal);
  CHECK(i.value(0) == ExtendedValue(0.0));
  CHECK(i.value(1) == ExtendedValue(0.5));
  CHECK(i.value(2).is_pos_inf());
  CHECK(i.value(3) == ExtendedValue(2.0));

  CHECK_THROWS_AS(minimal_rate(j, {}), std::invalid_argument);
  CHECK_THROWS_AS(minimal_rate(j, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(minimal_rate(j, {-1.0}), std::invalid_argument);
}

TEST_CASE("minimal rate of the catalog capacity limit approximates the distance rate") {
  const EntropyModel model = make_model("laplace");
  const Concentration upper = capacity_limit_concentration(model, CapacityMode::upper);
  const RateField i = minimal_rate(upper);
  const GridSpace& s = model.space();
  for (double x : {0.0, 0.5, -1.0, 2.0, -2.5}) {
    const std::size_t flat = s.index_of_point({x});
    REQUIRE(i.value(flat).is_finite());
    CHECK(std::abs(i.value(flat).value() - std::abs(x)) <= 2e-2);
  }
}

TEST_CASE("radius ladders decrease from the half width to zero") {
  const GridSpace s = GridSpace::line(-3.0, 3.0, 601);
  const std::vector<double> radii = default_radius_ladder(s);
  REQUIRE(radii.size() >= 3);
  CHECK(radii.front() == doctest::Approx(3.0));
  CHECK(radii.back() == 0.0);
  CHECK(radii[radii.size() - 2] == doctest::Approx(s.max_step()));
  for (std::size_t k = 1; k < radii.size(); ++k) CHECK(radii[k] < radii[k - 1]);
}

TEST_CASE("duality audit passes when the rate matches the concentration") {
  const GridSpace s = GridSpace::discrete_line(4);
  const GridFunction dens(s, {ExtendedValue(0.0), ExtendedValue(-0.5), ExtendedValue(-1.0),
                              ExtendedValue(-0.25)});
  const Concentration j = maxplus_concentration("demo", dens);
  const RateField i(s, {ExtendedValue(0.0), ExtendedValue(0.5), ExtendedValue(1.0),
                        ExtendedValue(0.25)},
                    RateField::Provenance::analytic);
  const CheckReport r = check_duality_bounds(j, i, 40, 7, 1e-9);
  CHECK(r.pass);
  CHECK(r.worst_violation == 0.0);
  CHECK(r.details["mode"] == "exhaustive");
  CHECK(r.details["lower"]["sets"]["pass"] == true);
  CHECK(r.details["lower"]["functions"]["pass"] == true);
  CHECK(r.details["upper"]["sets"]["pass"] == true);
  CHECK(r.details["upper"]["functions"]["pass"] == true);
}

TEST_CASE("duality audit passes for the zero concentration against the zero rate") {
  const GridSpace s = GridSpace::discrete_line(5);
  const Concentration j = maxplus_concentration("flat", GridFunction::constant(s, 0.0));
  const RateField i(s, std::vector<ExtendedValue>(5, ExtendedValue(0.0)),
                    RateField::Provenance::analytic);
  const CheckReport r = check_duality_bounds(j, i, 40, 11, 1e-9);
  CHECK(r.pass);
  CHECK(r.worst_violation == 0.0);
}

TEST_CASE("duality audit reports a consistent two-sided failure for an infinite rate") {
  // J == 0 on nonempty sets but I == +inf: the upper bound J(C) <= -inf_C I
  // fails on every set, and phi_J(f) <= sup(f - I) = -inf fails on every
  // function, so the two views of the upper equivalence must agree.
  const GridSpace s = GridSpace::discrete_line(4);
  const Concentration j = maxplus_concentration("flat", GridFunction::constant(s, 0.0));
  const RateField i(s, std::vector<ExtendedValue>(4, ExtendedValue::pos_inf()),
                    RateField::Provenance::analytic);
  const CheckReport r = check_duality_bounds(j, i, 40, 13, 1e-9);
  CHECK(r.pass);  // the equivalence itself is consistent ...
  CHECK(r.details["upper"]["sets"]["pass"] == false);       // ... but the bound fails
  CHECK(r.details["upper"]["functions"]["pass"] == false);  // on both sides alike
  CHECK(r.details["upper"]["consistent"] == true);
  CHECK(r.details["lower"]["sets"]["pass"] == true);  // lower bounds hold trivially
  CHECK(r.details["lower"]["functions"]["pass"] == true);
}

TEST_CASE("duality audit runs in sampled mode on box spaces") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const Concentration upper = capacity_limit_concentration(model, CapacityMode::upper);
  const RateField i = RateField::from_fn(
      model.space(),
      [](const std::vector<double>& x) { return ExtendedValue(std::abs(x[0])); },
      RateField::Provenance::analytic);
  const CheckReport r = check_duality_bounds(upper, i, 12, 2025, 2e-2);
  CHECK(r.details["mode"] == "sampled");
  CHECK(r.pass);
}

TEST_CASE("integral property audit is exact for max-plus concentrations") {
  std::mt19937_64 rng(4096);
  for (int rep = 0; rep < 5; ++rep) {
    const GridSpace s = random_discrete_space(rng);
    const Concentration j = maxplus_concentration("rand", random_dyadic_density(s, rng));
    const CheckReport r = check_integral_properties(j, 30, 1000 + rep, 1e-12);
    CHECK(r.pass);
    CHECK(r.worst_violation == 0.0);
    CHECK(r.details["maxitive_properties_included"] == true);
    REQUIRE(r.details["properties"].contains("b6_maxitive"));
    REQUIRE(r.details["properties"].contains("b7_convex"));
    for (const auto& [name, rec] : r.details["properties"].items()) {
      CHECK(rec["violation"].get<double>() == 0.0);
    }
  }
}

TEST_CASE("integral property audit covers capacity-limit concentrations") {
  const EntropyModel model = make_model("laplace", GridSpace::line(-3.0, 3.0, 121));
  const Concentration upper = capacity_limit_concentration(model, CapacityMode::upper);
  const CheckReport r = check_integral_properties(upper, 12, 555, 1e-10);
  CHECK(r.pass);
  CHECK(r.details["maxitive_properties_included"] == false);
  CHECK(!r.details["properties"].contains("b6_maxitive"));
  const auto& props = r.details["properties"];
  CHECK(props["b1_mask_identity"]["violation"].get<double>() == 0.0);
  CHECK(props["b2_zero"]["violation"].get<double>() == 0.0);
  CHECK(props["b3_translation"]["violation"].get<double>() <= 1e-12);
  CHECK(props["b4_monotone"]["violation"].get<double>() == 0.0);
  CHECK(props["b5_truncation"]["violation"].get<double>() == 0.0);
}

TEST_CASE("audits validate their trial counts") {
  const Concentration j = maxplus3();
  const RateField i(j.space(), std::vector<ExtendedValue>(3, ExtendedValue(0.0)),
                    RateField::Provenance::analytic);
  CHECK_THROWS_AS(check_duality_bounds(j, i, 0, 1, 1e-9), std::invalid_argument);
  CHECK_THROWS_AS(check_integral_properties(j, 0, 1, 1e-9), std::invalid_argument);
}
