#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "dxmcp/datagen.hpp"
#include "dxmcp/estimation.hpp"

using namespace dxmcp;
using Catch::Approx;

namespace {

double column_mean(const BinaryMatrix& q, std::size_t j) {
  return static_cast<double>(q.column_sum(j)) / static_cast<double>(q.rows());
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("lfc_params places each test on one boundary") {
  LfcScenario sc;
  sc.m = 3;
  sc.b = {1, 0, 1};
  sc.se0 = 0.8;
  sc.sp0 = 0.7;
  const auto t = lfc_params(sc);
  CHECK(t.se == std::vector<double>{0.8, 1.0, 0.8});
  CHECK(t.sp == std::vector<double>{1.0, 0.7, 1.0});

  sc.b = {1, 1, 1};
  CHECK(lfc_params(sc).sp == std::vector<double>(3, 1.0));
  CHECK(lfc_params(sc).se == std::vector<double>(3, 0.8));
  sc.b = {0, 0, 0};
  CHECK(lfc_params(sc).se == std::vector<double>(3, 1.0));
  CHECK(lfc_params(sc).sp == std::vector<double>(3, 0.7));

  LfcScenario alt;
  alt.m = 5;
  CHECK(alt.effective_b() == std::vector<int>{1, 0, 1, 0, 1});
}

TEST_CASE("lfc scenario validation") {
  LfcScenario sc;
  CHECK_NOTHROW(sc.validate());
  sc.b = {1, 0};
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.b = {};
  sc.rho_se = 1.0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.rho_se = 0.2;
  sc.se0 = 1.0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.se0 = 0.8;
  sc.n1 = 0;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("latent correlation inversion") {
  CHECK(latent_correlation(0.5, 0.5, 0.5) == Approx(std::sin(std::numbers::pi / 4)).margin(1e-7));
  CHECK(latent_correlation(0.8, 0.3, 0.0) == Approx(0.0).margin(1e-7));
  CHECK(latent_correlation(0.3, 0.3, 0.999) > 0.99);

  // Plug the result back into the orthant identity.
  for (double p1 : {0.2, 0.8, 0.95}) {
    for (double p2 : {0.5, 0.8}) {
      const auto [lo, hi] = binary_correlation_range(p1, p2);
      for (double rho : {0.1, 0.3, 0.6}) {
        if (rho >= hi) continue;
        const double z = latent_correlation(p1, p2, rho);
        const double joint = numerics::bivariate_normal_cdf(numerics::std_normal_quantile(p1),
                                                            numerics::std_normal_quantile(p2), z);
        const double target = p1 * p2 + rho * std::sqrt(p1 * (1 - p1) * p2 * (1 - p2));
        CHECK(std::abs(joint - target) <= 1e-8);
      }
      CHECK(lo < 0.0);
    }
  }
  double prev = -2;
  for (double rho = -0.3; rho <= 0.75; rho += 0.1) {
    const double z = latent_correlation(0.7, 0.8, rho);
    CHECK(z > prev);
    prev = z;
  }
}

TEST_CASE("infeasible binary correlation reports the range") {
  const auto [lo, hi] = binary_correlation_range(0.95, 0.5);
  CHECK(hi < 0.3);
  CHECK(hi == Approx(std::sqrt(0.5 * 0.05 / (0.95 * 0.5))).margin(1e-12));
  try {
    latent_correlation(0.95, 0.5, 0.6);
    FAIL("expected DomainError");
  } catch (const numerics::DomainError& e) {
    CHECK(std::string(e.what()).find("feasible") != std::string::npos);
  }
}

TEST_CASE("generated lfc data has the target margins and correlation") {
  LfcScenario one;
  one.m = 1;
  one.b = {1};
  one.n1 = 100000;
  one.n0 = 10;
  const auto d1 = generate_lfc(one, 17);
  CHECK(std::abs(column_mean(d1.q1, 0) - 0.8) <= 0.006);
  CHECK(d1.q0.column_sum(0) == 10);

  LfcScenario two;
  two.m = 2;
  two.b = {1, 1};
  two.rho_se = 0.5;
  two.n1 = 100000;
  two.n0 = 5;
  const auto d2 = generate_lfc(two, 18);
  const auto r = binary_correlation(d2.q1);
  CHECK(std::abs(r(0, 1) - 0.5) <= 0.02);
  CHECK(d2.q0.column_sum(0) == 5);
  CHECK(d2.q0.column_sum(1) == 5);
}

TEST_CASE("degenerate endpoints are constant columns") {
  LfcScenario sc;
  sc.m = 4;
  sc.b = {1, 1, 1, 1};
  sc.rho_se = 0.3;
  const auto d = generate_lfc(sc, 1);
  for (std::size_t j = 0; j < 4; ++j) CHECK(d.q0.column_sum(j) == sc.n0);
  sc.b = {0, 0, 0, 0};
  const auto e = generate_lfc(sc, 1);
  for (std::size_t j = 0; j < 4; ++j) CHECK(e.q1.column_sum(j) == sc.n1);
}

TEST_CASE("lfc generation matches truth across seeds") {
  LfcScenario sc;
  sc.m = 6;
  sc.rho_se = 0.4;
  sc.rho_sp = 0.6;
  sc.n1 = 4000;
  sc.n0 = 12000;
  const LfcGenerator gen(sc);
  const auto truth = gen.truth();
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    const auto d = gen.generate(seed);
    for (std::size_t j = 0; j < sc.m; ++j) {
      const double pse = truth.se[j], psp = truth.sp[j];
      CHECK(std::abs(column_mean(d.q1, j) - pse) <= 4 * std::sqrt(pse * (1 - pse) / sc.n1) + 1e-12);
      CHECK(std::abs(column_mean(d.q0, j) - psp) <= 4 * std::sqrt(psp * (1 - psp) / sc.n0) + 1e-12);
    }
    RawStudy raw = to_raw(d);
    CHECK_NOTHROW(validate_study(raw));
  }
  CHECK(gen.generate(7) == gen.generate(7));
  CHECK(gen.generate(7) == generate_lfc(sc, 7));
  CHECK_FALSE(gen.generate(7) == gen.generate(8));
  CHECK(gen.regularization_epsilon() <= 1e-9);
}

TEST_CASE("auc to binormal mean") {
  CHECK(auc_to_mean(0.5) == Approx(0.0).margin(1e-12));
  CHECK(auc_to_mean(0.8) == Approx(1.190232).margin(1e-6));
  CHECK(auc_to_mean(0.9) == Approx(1.812387).margin(1e-6));
  CHECK_THROWS_AS(auc_to_mean(1.0), numerics::DomainError);
  CHECK_THROWS_AS(auc_to_mean(0.0), numerics::DomainError);
  // AUC = Phi(mu / sqrt 2)
  CHECK(phi(auc_to_mean(0.73) / std::sqrt(2.0)) == Approx(0.73).margin(1e-9));
}

TEST_CASE("biomarker truth") {
  BiomarkerScenario sc;
  sc.auc = {0.8};
  sc.tests = {{0, 0.5}, {0, auc_to_mean(0.8) / 2}, {0, 40.0}};
  const auto t = biomarker_params(sc);
  CHECK(t.se[0] == Approx(0.75497).margin(1e-5));
  CHECK(t.sp[0] == Approx(0.69146).margin(1e-5));
  CHECK(t.se[1] == Approx(t.sp[1]).margin(1e-12));
  CHECK(t.se[2] < 1e-100);
  CHECK(t.sp[2] == 1.0);
}

TEST_CASE("biomarker scenario validation") {
  BiomarkerScenario sc;
  sc.auc = {0.8, 0.9};
  sc.tests = {{0, 0.5}};
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.tests = {{0, 0.5}, {2, 0.1}};
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.tests = {{0, 0.5}, {1, std::nan("")}};
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  sc.tests = {{0, 0.5}, {1, 0.1}};
  CHECK_NOTHROW(sc.validate());
}

TEST_CASE("generated biomarker data") {
  BiomarkerScenario sc;
  sc.auc = {0.8};
  sc.tests = {{0, 0.5}};
  sc.n1 = sc.n0 = 100000;
  const auto d = generate_biomarker(sc, 4);
  CHECK(std::abs(column_mean(d.q1, 0) - 0.75497) <= 0.006);
  CHECK(std::abs(column_mean(d.q0, 0) - 0.69146) <= 0.006);

  BiomarkerScenario low;
  low.auc = {0.8};
  low.tests = {{0, -40.0}};
  low.n1 = 500;
  low.n0 = 10;
  CHECK(generate_biomarker(low, 1).q1.column_sum(0) == 500);
  CHECK(generate_biomarker(low, 1).q0.column_sum(0) == 0);

  BiomarkerScenario near;
  near.auc = {0.85, 0.9};
  near.rho0 = near.rho1 = 0.5;
  near.tests = {{0, 0.4}, {0, 0.45}, {0, 0.4}, {1, 0.8}};
  near.n1 = 100000;
  near.n0 = 100;
  const auto dn = generate_biomarker(near, 5);
  const auto r = binary_correlation(dn.q1);
  CHECK(r(0, 1) > 0.8);
  CHECK(r(0, 2) == Approx(1.0));
  for (std::size_t i = 0; i < dn.n1(); ++i) REQUIRE(dn.q1(i, 0) == dn.q1(i, 2));
  CHECK(generate_biomarker(near, 5) == dn);
  CHECK_NOTHROW(validate_study(to_raw(dn)));
}
