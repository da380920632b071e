#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dxmcp/procedures.hpp"

using namespace dxmcp;
using Catch::Approx;

namespace {

// Independent binary columns with the given success probabilities.
BinaryMatrix random_matrix(std::size_t n, const std::vector<double>& p, std::uint64_t seed) {
  CounterRng rng(seed);
  BinaryMatrix q(n, p.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p.size(); ++j) q(i, j) = rng.uniform() < p[j];
  return q;
}

StudyData random_study(std::size_t n1, std::size_t n0, const std::vector<double>& se,
                       const std::vector<double>& sp, std::uint64_t seed) {
  StudyData d;
  d.q1 = random_matrix(n1, se, derive_seed(seed, 1));
  d.q0 = random_matrix(n0, sp, derive_seed(seed, 0));
  for (std::size_t j = 0; j < se.size(); ++j) d.test_names.push_back("t" + std::to_string(j));
  return d;
}

// Exactly `x` successes out of n in every column, spread so columns differ.
StudyData exact_study(std::size_t n, std::size_t x1, std::size_t x0) {
  StudyData d;
  d.q1 = BinaryMatrix(n, 1);
  d.q0 = BinaryMatrix(n, 1);
  for (std::size_t i = 0; i < x1; ++i) d.q1(i, 0) = 1;
  for (std::size_t i = 0; i < x0; ++i) d.q0(i, 0) = 1;
  d.test_names = {"t"};
  return d;
}

// Summary with prescribed z statistics and correlation (only what the
// parametric procedures read).
AccuracySummary fake_summary(const std::vector<double>& z_se, const std::vector<double>& z_sp,
                             numerics::CorrelationMatrix r) {
  AccuracySummary s;
  const std::size_t m = z_se.size();
  s.se_hat.assign(m, 0.9);
  s.sp_hat.assign(m, 0.9);
  s.se_se.assign(m, 0.03);
  s.sp_se.assign(m, 0.03);
  s.z_se = z_se;
  s.z_sp = z_sp;
  s.r_hat = std::move(r);
  s.n1 = s.n0 = 100;
  return s;
}

MethodSpec method_of(MethodKind kind, Calibration cal = Calibration::kLeastFavorable) {
  MethodSpec m;
  m.kind = kind;
  m.calibration = cal;
  return m;
}

double phi_inv(double p) { return numerics::std_normal_quantile(p); }

}  // namespace

TEST_CASE("method names round-trip") {
  for (auto k : {MethodKind::kNone, MethodKind::kBonferroni, MethodKind::kMaxT,
                 MethodKind::kPairsBootstrap, MethodKind::kWildBootstrap})
    CHECK(parse_method_kind(to_string(k)) == k);
  CHECK(parse_method_kind("holm") == std::nullopt);
  CHECK(parse_wild_weights("mammen") == WildWeights::kMammen);
  CHECK(parse_calibration("max_min") == Calibration::kMaxMin);
  CHECK(parse_calibration("equicoordinate_2m") == Calibration::kEquicoordinate2m);
  CHECK(parse_calibration("lfc") == Calibration::kLeastFavorable);
}

TEST_CASE("method spec validation") {
  MethodSpec m;
  CHECK_NOTHROW(m.validate());
  m.b_boot = 99;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.b_boot = 100;
  m.mc_draws = 9999;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("no adjustment") {
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto s = fake_summary({3.0, 3.0}, {2.5, 1.0}, numerics::CorrelationMatrix::identity(4));
  const auto r = decide_none(s, hyp);
  CHECK(r.c_comparison == Approx(1.95996).margin(1e-5));
  CHECK(r.c_confidence == Approx(phi_inv(0.9875)));
  CHECK(r.reject == std::vector<bool>{true, false});
  CHECK(r.p_adj[0] == Approx(0.00621).margin(1e-5));
  CHECK(r.p_adj[1] == Approx(1 - numerics::std_normal_cdf(1.0)));
  CHECK(r.rejections() == 1);
  CHECK(r.method.kind == MethodKind::kNone);
}

TEST_CASE("Bonferroni") {
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto one = fake_summary({2.5}, {2.2}, numerics::CorrelationMatrix::identity(2));
  CHECK(decide_bonferroni(one, hyp).c_comparison == decide_none(one, hyp).c_comparison);

  std::vector<double> z(10, 2.9);
  z[3] = 2.7;
  const auto ten = fake_summary(z, std::vector<double>(10, 5.0), numerics::CorrelationMatrix::identity(20));
  const auto r = decide_bonferroni(ten, hyp);
  CHECK(r.c_comparison == Approx(2.80703).margin(1e-5));
  CHECK(r.c_confidence == Approx(3.02334).margin(1e-5));
  CHECK(r.rejections() == 9);
  CHECK_FALSE(r.reject[3]);
  CHECK(r.p_adj[0] == Approx(10 * (1 - numerics::std_normal_cdf(2.9))));
  const auto low = fake_summary({0.1, -1.0}, {0.1, 0.1}, numerics::CorrelationMatrix::identity(4));
  CHECK(decide_bonferroni(low, hyp).p_adj[0] == Approx(2 * (1 - numerics::std_normal_cdf(0.1))));
  CHECK(decide_bonferroni(low, hyp).p_adj[1] == 1.0);
}

TEST_CASE("maxT closed forms under max-min calibration") {
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto mm = method_of(MethodKind::kMaxT, Calibration::kMaxMin);

  const auto one = fake_summary({0.5}, {0.5}, numerics::CorrelationMatrix::identity(2));
  const double c1 = decide_maxt(one, hyp, mm).c_comparison;
  CHECK(c1 == Approx(0.99446).margin(0.02));

  // Five copies of one test: perfect correlation within each block.
  numerics::SquareMatrix e(10, 0.0);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) e(i, j) = (i < 5) == (j < 5) ? 1.0 : 0.0;
  const auto dup = fake_summary(std::vector<double>(5, 0.5), std::vector<double>(5, 0.5),
                                numerics::CorrelationMatrix(e));
  CHECK(decide_maxt(dup, hyp, mm).c_comparison == Approx(c1).margin(0.02));

  const auto ten = fake_summary(std::vector<double>(10, 0.5), std::vector<double>(10, 0.5),
                                numerics::CorrelationMatrix::identity(20));
  const double target = phi_inv(1 - std::sqrt(1 - std::pow(0.975, 0.1)));
  CHECK(decide_maxt(ten, hyp, mm).c_comparison == Approx(target).margin(0.03));
}

TEST_CASE("maxT under least-favorable calibration") {
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto lfc = method_of(MethodKind::kMaxT);
  const auto one = fake_summary({0.5}, {3.0}, numerics::CorrelationMatrix::identity(2));
  CHECK(decide_maxt(one, hyp, lfc).c_comparison == Approx(1.95996).margin(0.02));
  // Independent binding coordinates: Phi^-1(0.975^(1/m)).
  const auto ten = fake_summary(std::vector<double>(10, 0.5), std::vector<double>(10, 0.7),
                                numerics::CorrelationMatrix::identity(20));
  const auto r = decide_maxt(ten, hyp, lfc);
  CHECK(r.c_comparison == Approx(phi_inv(std::pow(0.975, 0.1))).margin(0.03));
  // Confidence: all 20 coordinates.
  CHECK(r.c_confidence == Approx(phi_inv(std::pow(0.975, 0.05))).margin(0.03));

  const auto eq = method_of(MethodKind::kMaxT, Calibration::kEquicoordinate2m);
  const auto r2 = decide_maxt(ten, hyp, eq);
  CHECK(r2.c_comparison == r2.c_confidence);
}

TEST_CASE("binding coordinates follow the smaller statistic") {
  const auto s = fake_summary({1.0, 2.0, 3.0}, {2.0, 1.0, 3.0}, numerics::CorrelationMatrix::identity(6));
  CHECK(binding_coordinates(s) == std::vector<std::size_t>{0, 4, 2});
  const auto blocked = numerics::CorrelationMatrix::identity(6);
  auto r = blocked;
  r.set(0, 3, 0.5);  // Se_1 with Sp_1
  r.set(1, 2, 0.2);  // Se_2 with Se_3
  const auto inter = interleave_pairs(r);
  CHECK(inter(0, 1) == 0.5);
  CHECK(inter(2, 4) == 0.2);
}

TEST_CASE("pairs bootstrap degenerate resampling") {
  StudyData d;
  d.q1 = BinaryMatrix(20, 3, 1);
  d.q0 = BinaryMatrix(30, 3, 0);
  d.q0(0, 0) = 0;
  d.test_names = {"a", "b", "c"};
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto s = summarize(d, hyp);
  for (auto cal : {Calibration::kLeastFavorable, Calibration::kMaxMin}) {
    const auto r = decide_pairs_bootstrap(d, s, hyp, method_of(MethodKind::kPairsBootstrap, cal));
    CHECK(r.c_comparison == 0.0);
    CHECK(r.c_confidence == 0.0);
  }
}

TEST_CASE("wild bootstrap with unit weights is degenerate") {
  const auto d = random_study(50, 80, {0.8, 0.9}, {0.85, 0.7}, 3);
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto s = summarize(d, hyp);
  const auto r = decide_wild_bootstrap(d, s, hyp, method_of(MethodKind::kWildBootstrap),
                                       [](CounterRng&) { return 1.0; });
  // zero up to rounding of the residual sums
  CHECK(std::abs(r.c_comparison) < 1e-12);
  CHECK(std::abs(r.c_confidence) < 1e-12);
}

TEST_CASE("wild bootstrap with a single subject group") {
  StudyData d;
  d.q1 = BinaryMatrix(1, 1, 1);
  d.q0 = BinaryMatrix(1, 1, 0);
  d.test_names = {"t"};
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto r = decide_wild_bootstrap(d, summarize(d, hyp), hyp, method_of(MethodKind::kWildBootstrap));
  CHECK(r.c_comparison == 0.0);
  CHECK(r.c_confidence == 0.0);
}

TEST_CASE("bootstraps agree with maxT at moderate n") {
  const auto d = exact_study(200, 180, 180);
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto s = summarize(d, hyp);
  {
    const auto cal = Calibration::kMaxMin;
    const double maxt = decide_maxt(s, hyp, method_of(MethodKind::kMaxT, cal)).c_comparison;
    const double pairs = decide_pairs_bootstrap(d, s, hyp, method_of(MethodKind::kPairsBootstrap, cal)).c_comparison;
    const double wild = decide_wild_bootstrap(d, s, hyp, method_of(MethodKind::kWildBootstrap, cal)).c_comparison;
    INFO("maxt " << maxt << " pairs " << pairs << " wild " << wild);
    CHECK(std::abs(pairs - maxt) <= 0.15);
    // skew-matching weights follow the same upper tail; never below the normal limit
    CHECK(wild >= maxt - 0.15);
  }
  {
    // A single binding endpoint near 0.9: the resample-studentized bootstrap
    // statistics have a heavier upper tail than their normal limit, so they
    // are only bounded from below by the parametric value at this n.
    const double maxt = decide_maxt(s, hyp, method_of(MethodKind::kMaxT)).c_comparison;
    const double pairs = decide_pairs_bootstrap(d, s, hyp, method_of(MethodKind::kPairsBootstrap)).c_comparison;
    const double wild = decide_wild_bootstrap(d, s, hyp, method_of(MethodKind::kWildBootstrap)).c_comparison;
    INFO("maxt " << maxt << " pairs " << pairs << " wild " << wild);
    CHECK(pairs >= maxt - 0.15);
    CHECK(wild >= maxt - 0.15);
    CHECK(std::abs(wild - pairs) <= 0.3);
  }
  const auto big = exact_study(2000, 1800, 1700);
  const auto sb = summarize(big, hyp);
  const double pairs = decide_pairs_bootstrap(big, sb, hyp, method_of(MethodKind::kPairsBootstrap)).c_comparison;
  MethodSpec rademacher = method_of(MethodKind::kWildBootstrap);
  rademacher.wild_weights = WildWeights::kRademacher;
  CHECK(std::abs(decide_wild_bootstrap(big, sb, hyp, rademacher).c_comparison - pairs) <= 0.15);
  CHECK(std::abs(decide_wild_bootstrap(big, sb, hyp, method_of(MethodKind::kWildBootstrap)).c_comparison - pairs) <= 0.15);
}

namespace {

// Brute-force pairs bootstrap: enumerate all n^n ordered resamples of each
// group (n = 4), weight each combination equally and read off the
// type-1 quantile of the max-min statistic.
double exhaustive_pairs_quantile(const StudyData& d, const AccuracySummary& s, double level) {
  const std::size_t m = d.m();
  auto all_resamples = [&](const BinaryMatrix& q, const std::vector<double>& centre) {
    const std::size_t n = q.rows();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= n;
    std::vector<std::vector<double>> out;
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<double> sums(m, 0.0);
      std::size_t c = code;
      for (std::size_t i = 0; i < n; ++i, c /= n)
        for (std::size_t j = 0; j < m; ++j) sums[j] += q(c % n, j);
      std::vector<double> z(m);
      for (std::size_t j = 0; j < m; ++j) {
        const double p = (sums[j] + s.pseudo_count) / (n + 2 * s.pseudo_count);
        z[j] = (p - centre[j]) / std::sqrt(p * (1 - p) / n);
      }
      out.push_back(z);
    }
    return out;
  };
  const auto r1 = all_resamples(d.q1, s.se_hat);
  const auto r0 = all_resamples(d.q0, s.sp_hat);
  std::vector<double> t;
  t.reserve(r1.size() * r0.size());
  for (const auto& a : r1)
    for (const auto& b : r0) {
      double best = -INFINITY;
      for (std::size_t j = 0; j < m; ++j) best = std::max(best, std::min(a[j], b[j]));
      t.push_back(best);
    }
  std::sort(t.begin(), t.end());
  return t[static_cast<std::size_t>(std::ceil(level * t.size() - 1e-9)) - 1];
}

}  // namespace

TEST_CASE("pairs bootstrap matches exhaustive enumeration at n = 4") {
  StudyData d;
  d.q1 = BinaryMatrix(4, 2);
  d.q0 = BinaryMatrix(4, 2);
  const int q1[4][2] = {{1, 1}, {1, 0}, {0, 1}, {1, 1}};
  const int q0[4][2] = {{1, 0}, {1, 1}, {0, 1}, {1, 1}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      d.q1(i, j) = static_cast<std::uint8_t>(q1[i][j]);
      d.q0(i, j) = static_cast<std::uint8_t>(q0[i][j]);
    }
  d.test_names = {"a", "b"};
  const HypothesisSpec hyp{0.6, 0.6, 0.1};
  const auto s = summarize(d, hyp);
  const double oracle = exhaustive_pairs_quantile(d, s, 1 - hyp.alpha);
  MethodSpec big = method_of(MethodKind::kPairsBootstrap, Calibration::kMaxMin);
  big.b_boot = 200000;
  const double c = decide_pairs_bootstrap(d, s, hyp, big).c_comparison;
  INFO("oracle " << oracle << " bootstrap " << c);
  CHECK(std::abs(c - oracle) <= 0.05);
}

TEST_CASE("decisions and p-values are dual to the critical value") {
  const HypothesisSpec hyp{0.8, 0.75, 0.025};
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto d = random_study(60 + 20 * seed, 120, {0.88, 0.95, 0.8, 0.92, 0.97},
                                {0.9, 0.8, 0.95, 0.85, 0.99}, seed);
    const auto s = summarize(d, hyp);
    for (auto kind : {MethodKind::kNone, MethodKind::kBonferroni, MethodKind::kMaxT,
                      MethodKind::kPairsBootstrap, MethodKind::kWildBootstrap}) {
      for (auto cal : {Calibration::kLeastFavorable, Calibration::kMaxMin, Calibration::kEquicoordinate2m}) {
        const auto r = decide(d, s, hyp, method_of(kind, cal));
        INFO("method " << to_string(kind) << " calibration " << to_string(cal));
        REQUIRE(r.reject.size() == 5);
        for (std::size_t j = 0; j < 5; ++j) {
          CHECK(r.reject[j] == (s.min_z(j) > r.c_comparison));
          if (r.p_adj[j] <= hyp.alpha) CHECK(r.reject[j]);
          CHECK(r.p_adj[j] >= 0.0);
          CHECK(r.p_adj[j] <= 1.0);
          for (std::size_t k = 0; k < 5; ++k)
            if (s.min_z(k) > s.min_z(j)) CHECK(r.p_adj[k] <= r.p_adj[j]);
        }
        CHECK(r.c_confidence >= r.c_comparison - 0.03);
        CHECK(r.method.kind == kind);
      }
    }
  }
}

TEST_CASE("Bonferroni is never less conservative than maxT") {
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const auto d = random_study(100, 300, std::vector<double>(6, 0.85), std::vector<double>(6, 0.85), seed);
    const auto s = summarize(d, hyp);
    const auto b = decide_bonferroni(s, hyp);
    for (auto cal : {Calibration::kLeastFavorable, Calibration::kMaxMin, Calibration::kEquicoordinate2m}) {
      const auto t = decide_maxt(s, hyp, method_of(MethodKind::kMaxT, cal));
      // equicoordinate calibration decides at the 2m-dimensional value
      const double bonf = cal == Calibration::kEquicoordinate2m ? b.c_confidence : b.c_comparison;
      CHECK(bonf >= t.c_comparison - 0.03);
      CHECK(b.c_confidence >= t.c_confidence - 0.03);
      if (t.c_comparison <= b.c_comparison)
        for (std::size_t j = 0; j < s.m(); ++j)
          if (b.reject[j]) CHECK(t.reject[j]);
    }
  }
}

TEST_CASE("fixed seeds reproduce results bit for bit") {
  const auto d = random_study(80, 160, {0.9, 0.85, 0.8}, {0.8, 0.9, 0.95}, 9);
  const HypothesisSpec hyp{0.75, 0.75, 0.025};
  const auto s = summarize(d, hyp);
  for (auto kind : {MethodKind::kMaxT, MethodKind::kPairsBootstrap, MethodKind::kWildBootstrap}) {
    const auto a = decide(d, s, hyp, method_of(kind));
    const auto b = decide(d, s, hyp, method_of(kind));
    CHECK(a.c_comparison == b.c_comparison);
    CHECK(a.c_confidence == b.c_confidence);
    CHECK(a.p_adj == b.p_adj);
    auto other = method_of(kind);
    other.seed = 1;
    const auto c = decide(d, s, hyp, other);
    CHECK((c.c_comparison != a.c_comparison || c.c_confidence != a.c_confidence || c.p_adj != a.p_adj));
  }
}

TEST_CASE("bootstraps are invariant to subject order") {
  const auto d = random_study(70, 150, {0.9, 0.85, 0.8}, {0.8, 0.9, 0.95}, 21);
  StudyData shuffled = d;
  auto permute = [](const BinaryMatrix& q, std::uint64_t seed) {
    std::vector<std::size_t> order(q.rows());
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    BinaryMatrix out(q.rows(), q.cols());
    for (std::size_t i = 0; i < q.rows(); ++i)
      for (std::size_t j = 0; j < q.cols(); ++j) out(i, j) = q(order[i], j);
    return out;
  };
  shuffled.q1 = permute(d.q1, 1);
  shuffled.q0 = permute(d.q0, 2);
  REQUIRE(!(shuffled.q1 == d.q1));
  const HypothesisSpec hyp{0.75, 0.75, 0.025};
  for (auto kind : {MethodKind::kPairsBootstrap, MethodKind::kWildBootstrap}) {
    const auto a = decide(d, summarize(d, hyp), hyp, method_of(kind));
    const auto b = decide(shuffled, summarize(shuffled, hyp), hyp, method_of(kind));
    CHECK(a.c_comparison == b.c_comparison);
    CHECK(a.c_confidence == b.c_confidence);
    CHECK(a.p_adj == b.p_adj);
  }
}

TEST_CASE("permuting tests permutes the outputs") {
  const auto d = random_study(150, 300, {0.95, 0.85, 0.9, 0.7}, {0.9, 0.95, 0.85, 0.99}, 5);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  StudyData p = d;
  for (std::size_t i = 0; i < d.n1(); ++i)
    for (std::size_t j = 0; j < 4; ++j) p.q1(i, j) = d.q1(i, perm[j]);
  for (std::size_t i = 0; i < d.n0(); ++i)
    for (std::size_t j = 0; j < 4; ++j) p.q0(i, j) = d.q0(i, perm[j]);
  const HypothesisSpec hyp{0.8, 0.8, 0.025};
  const auto s = summarize(d, hyp);
  const auto sp = summarize(p, hyp);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(sp.z_se[j] == s.z_se[perm[j]]);
    CHECK(sp.z_sp[j] == s.z_sp[perm[j]]);
  }
  for (auto kind : {MethodKind::kNone, MethodKind::kBonferroni}) {
    const auto a = decide(d, s, hyp, method_of(kind));
    const auto b = decide(p, sp, hyp, method_of(kind));
    CHECK(a.c_comparison == b.c_comparison);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(b.reject[j] == a.reject[perm[j]]);
      CHECK(b.p_adj[j] == a.p_adj[perm[j]]);
    }
  }
  for (auto kind : {MethodKind::kMaxT, MethodKind::kPairsBootstrap, MethodKind::kWildBootstrap}) {
    const auto a = decide(d, s, hyp, method_of(kind));
    const auto b = decide(p, sp, hyp, method_of(kind));
    // Column order changes the canonical row order and hence the resamples;
    // bootstrap quantiles of near-degenerate columns move in discrete steps.
    CHECK(std::abs(a.c_comparison - b.c_comparison) < 0.3);
    for (std::size_t j = 0; j < 4; ++j)
      if (std::abs(s.min_z(perm[j]) - a.c_comparison) > 0.4) CHECK(b.reject[j] == a.reject[perm[j]]);
  }
}
