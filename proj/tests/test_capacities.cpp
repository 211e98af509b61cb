#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>
#include <random>
#include <sstream>

#include "rgdist/capacities.hpp"

using namespace rgdist;

namespace {

double poisson_pmf(int n, double x) { return std::exp(n * std::log(x) - x - std::lgamma(n + 1.0)); }

CapacitySequence random_sequence(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 8.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return CapacitySequence(std::move(v));
}

}  // namespace

TEST_CASE("inverse survival") {
  const auto p = SurvivalModel::pareto(3.5, 1.0);
  CHECK(p.inverse_survival(1.0) == doctest::Approx(1.0));
  for (double u : {0.9, 0.5, 0.1, 1e-3, 1e-9})
    CHECK(p.inverse_survival(u) == doctest::Approx(std::pow(1.0 / u, 1.0 / 2.5)).epsilon(1e-14));

  const auto c = SurvivalModel::pareto(4.0, 3.0);
  // (c/u)^{1/(τ-1)} until the support minimum c^{1/(τ-1)} clips it.
  CHECK(c.inverse_survival(0.5) == doctest::Approx(std::pow(6.0, 1.0 / 3.0)));
  CHECK(c.inverse_survival(1.0) == doctest::Approx(std::pow(3.0, 1.0 / 3.0)));

  const auto t = SurvivalModel::table({{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.0}});
  CHECK(t.inverse_survival(0.5) == 1.0);
  CHECK(t.inverse_survival(0.49) == 2.0);
  CHECK(t.inverse_survival(0.75) == 1.0);
  CHECK(t.inverse_survival(1.0) == 1.0);

  CHECK_THROWS_AS((void)p.inverse_survival(0.0), std::domain_error);
  CHECK_THROWS_AS((void)p.inverse_survival(1.5), std::domain_error);
  CHECK_THROWS_AS((void)p.inverse_survival(-0.1), std::domain_error);

  double prev = INFINITY;
  for (int k = 1; k <= 1000; ++k) {
    const double v = p.inverse_survival(k / 1000.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SurvivalModel::pareto(3.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::pareto(3.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::table({{0.0, 0.9}, {1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::table({{0.0, 1.0}, {1.0, 0.6}, {2.0, 0.7}, {3.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::table({{0.0, 1.0}, {1.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(SurvivalModel::table({{1.0, 1.0}, {1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("figure-1 model") {
  const auto m = SurvivalModel::figure1();
  CHECK(m.nu() == doctest::Approx(2.231381).epsilon(1e-6));
  CHECK(m.support_min() == doctest::Approx(0.7437937).epsilon(1e-12));
  // ν by quadrature of the density (τ-1) c x^{-τ} on [x0, ∞).
  const auto& p = std::get<SurvivalModel::Pareto>(m.variant());
  const double x0 = m.support_min();
  // x = x0 / s^2 maps the heavy tail onto a smooth integrand over (0, 1].
  auto moment = [&](int k) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double s) {
          const double x = x0 / (s * s);
          return std::pow(x, k) * (p.tau - 1.0) * p.c * std::pow(x, -p.tau) * 2.0 * x0 /
                 (s * s * s);
        },
        0.0, 1.0, 15, 1e-13);
  };
  CHECK(moment(0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(moment(2) / moment(1) == doctest::Approx(m.nu()).epsilon(1e-10));
}

TEST_CASE("table model moments") {
  const auto t = SurvivalModel::table({{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.0}});
  CHECK(t.mean() == doctest::Approx(1.5));
  CHECK(t.second_moment() == doctest::Approx(2.5));
  CHECK(t.survival(0.5) == 1.0);
  CHECK(t.survival(1.0) == 0.5);
  CHECK(t.survival(1.5) == 0.5);
  CHECK(t.survival(2.0) == 0.0);
}

TEST_CASE("deterministic capacities") {
  const auto c = deterministic_capacities(SurvivalModel::constant(2.0), 3);
  CHECK(c.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(c[i] == 2.0);

  const auto p = deterministic_capacities(SurvivalModel::pareto(3.5, 1.0), 2);
  CHECK(p[0] == doctest::Approx(1.3195079107728942));
  CHECK(p[1] == doctest::Approx(1.0));

  const auto big = deterministic_capacities(SurvivalModel::figure1(), 5000);
  for (std::size_t i = 1; i < big.size(); ++i) CHECK(big[i] <= big[i - 1]);
  CHECK_THROWS_AS(deterministic_capacities(SurvivalModel::constant(1.0), 0),
                  std::invalid_argument);
}

TEST_CASE("iid capacities") {
  const auto c = iid_capacities(SurvivalModel::constant(2.0), 100, 7);
  for (double v : c.values()) CHECK(v == 2.0);

  const auto model = SurvivalModel::pareto(3.5, 1.0);
  const auto s = iid_capacities(model, 100000, 42);
  double m = 0.0;
  double m2 = 0.0;
  for (double v : s.values()) {
    m += v;
    m2 += v * v;
  }
  m /= 1e5;
  const double se = std::sqrt((m2 / 1e5 - m * m) / 1e5);
  CHECK(std::abs(m - 2.5 / 1.5) < 3.0 * se);

  const auto a = iid_capacities(model, 1000, 9);
  const auto b = iid_capacities(model, 1000, 9);
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const auto d = iid_capacities(model, 1000, 10);
  CHECK(!std::equal(a.values().begin(), a.values().end(), d.values().begin()));
}

TEST_CASE("moments") {
  const auto m = moments(CapacitySequence({1.0, 2.0, 3.0}));
  CHECK(m.total == 6.0);
  CHECK(m.mean == 2.0);
  CHECK(m.nu == doctest::Approx(14.0 / 6.0).epsilon(1e-15));
  const auto c = moments(CapacitySequence(std::vector<double>(7, 1.75)));
  CHECK(c.mean == doctest::Approx(1.75));
  CHECK(c.nu == doctest::Approx(1.75));
  const auto one = moments(CapacitySequence({5.0}));
  CHECK(one.total == 5.0);
  CHECK(one.mean == 5.0);
  CHECK(one.nu == 5.0);
  CHECK_THROWS_AS(moments(std::span<const double>{}), std::domain_error);
  CHECK_THROWS_AS(CapacitySequence({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(CapacitySequence(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("mark law") {
  const CapacitySequence s({1.0, 2.0, 3.0});
  const auto law = mark_law(s);
  CHECK(law.weights()[0] == doctest::Approx(1.0 / 6.0));
  CHECK(law.weights()[1] == doctest::Approx(1.0 / 3.0));
  CHECK(law.weights()[2] == doctest::Approx(0.5));
  CHECK(law.mean() == doctest::Approx(14.0 / 6.0).epsilon(1e-15));

  const auto u = mark_law(CapacitySequence(std::vector<double>(4, 3.0)));
  for (double w : u.weights()) CHECK(w == doctest::Approx(0.25));

  // Alias sampling frequencies.
  Engine g(3);
  std::array<int, 3> hits{};
  for (int k = 0; k < 600000; ++k) ++hits[law.sample(g)];
  for (int i = 0; i < 3; ++i) {
    const double p = law.weights()[i];
    const double se = std::sqrt(p * (1 - p) / 600000.0);
    CHECK(std::abs(hits[i] / 600000.0 - p) < 4 * se);
  }
}

TEST_CASE("offspring laws") {
  const auto one = offspring_laws(CapacitySequence({2.0}), 30);
  CHECK(one.f.pmf[1] == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(one.g.pmf[0] == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  const auto c = offspring_laws(CapacitySequence(std::vector<double>(5, 1.5)), 40);
  for (int n = 0; n <= 40; ++n) {
    CHECK(c.f.pmf[n] == doctest::Approx(poisson_pmf(n, 1.5)).epsilon(1e-13));
    CHECK(c.g.pmf[n] == doctest::Approx(poisson_pmf(n, 1.5)).epsilon(1e-13));
  }

  std::mt19937_64 g(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = random_sequence(g, 50);
    const auto laws = offspring_laws(s);
    double sf = laws.f.tail_mass;
    double sg = laws.g.tail_mass;
    for (double p : laws.f.pmf) sf += p;
    for (double p : laws.g.pmf) sg += p;
    CHECK(sf == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sg == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(laws.f.tail_mass < kDefaultTailCeiling);
    for (std::size_t n = 0; n + 1 < laws.f.pmf.size(); ++n) {
      const double lhs = laws.g.pmf[n] * s.mean();
      const double rhs = (n + 1) * laws.f.pmf[n + 1];
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(rhs), 1e-300));
    }
  }

  CHECK_THROWS_AS(offspring_laws(CapacitySequence({20.0}), 5), TruncationError);
  try {
    (void)offspring_laws(CapacitySequence({20.0}), 5);
  } catch (const TruncationError& e) {
    CHECK(e.tail_mass() > 0.9);
  }
}

TEST_CASE("adaptive truncation") {
  for (double r : {0.1, 1.0, 5.0, 40.0, 700.0}) {
    const auto n = adaptive_n_max(r, 1e-10);
    CHECK(MixedPoissonLaw::poisson(r, n).tail_mass < 1e-10);
    CHECK(MixedPoissonLaw::poisson(r, n).tail_mass >= 0.0);
  }
}

TEST_CASE("size bias") {
  const MixingLaw law({1.0, 3.0}, {0.5, 0.5});
  const auto b = size_bias(law);
  CHECK(b.weights()[0] == doctest::Approx(0.25));
  CHECK(b.weights()[1] == doctest::Approx(0.75));
  const auto single = size_bias(MixingLaw({2.0}, {1.0}));
  CHECK(single.weights()[0] == 1.0);
  const auto flat = size_bias(MixingLaw({2.0, 2.0, 2.0}, {0.2, 0.3, 0.5}));
  CHECK(flat.weights()[1] == doctest::Approx(0.3));

  const CapacitySequence s({0.5, 1.0, 4.0, 2.5});
  std::vector<double> atoms(s.values().begin(), s.values().end());
  const auto uni = size_bias(MixingLaw(atoms, std::vector<double>(4, 0.25)));
  const auto mark = mark_law(s);
  for (int i = 0; i < 4; ++i) CHECK(uni.weights()[i] == doctest::Approx(mark.weights()[i]));

  CHECK_THROWS_AS(MixingLaw({1.0}, {0.5}), std::invalid_argument);
}

TEST_CASE("total variation") {
  MixedPoissonLaw a{{0.5, 0.5}, 0.0};
  MixedPoissonLaw b{{0.75, 0.25}, 0.0};
  CHECK(total_variation(a, b) == doctest::Approx(0.25));
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(MixedPoissonLaw{{1.0, 0.0}, 0.0}, MixedPoissonLaw{{0.0, 1.0}, 0.0}) ==
        doctest::Approx(1.0));
  // Shorter law is padded; tails form one coordinate.
  CHECK(total_variation(MixedPoissonLaw{{1.0}, 0.0}, MixedPoissonLaw{{0.5, 0.3}, 0.2}) ==
        doctest::Approx(0.5));
}

TEST_CASE("condition checks") {
  const auto seq = CapacitySequence(std::vector<double>(50, 2.0));
  ConditionConfig cfg;
  cfg.mu = 2.0;
  cfg.nu = 2.0;
  cfg.f = MixedPoissonLaw::poisson(2.0, 40);
  cfg.g = MixedPoissonLaw::poisson(2.0, 40);
  const auto r = check_conditions(seq, cfg, 40);
  CHECK(r.mu_gap == 0.0);
  CHECK(r.nu_gap == 0.0);
  CHECK(r.f_tv < 1e-12);
  CHECK(r.g_tv < 1e-12);
  CHECK(r.pass);

  const auto model = SurvivalModel::pareto(3.5, 1.0);
  const auto lim = ConditionConfig::for_model(model, 3.5, 0.05, 200);
  const auto r3 = check_conditions(deterministic_capacities(model, 1000), lim, 200);
  const auto r4 = check_conditions(deterministic_capacities(model, 10000), lim, 200);
  CHECK(r4.mu_gap < r3.mu_gap);
  CHECK(r4.nu_gap < r3.nu_gap);
  CHECK(r4.f_tv < r3.f_tv);
  CHECK(r4.g_tv < r3.g_tv);
  CHECK(r3.max_lambda == doctest::Approx(std::pow(1000.0, 0.4)));
  CHECK(r3.max_lambda <= r3.max_bound);
  CHECK(r3.max_bound == doctest::Approx(std::pow(1000.0, 0.45)));

  ConditionConfig bad = lim;
  bad.epsilon = 0.2;  // γ = 0.6
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  auto bounded = lim;
  bounded.moment_bound = 1e-3;
  CHECK_FALSE(check_conditions(deterministic_capacities(model, 1000), bounded, 200).pass);
  CHECK_THROWS_AS(check_conditions(deterministic_capacities(model, 10000), lim, 60),
                  TruncationError);
}

TEST_CASE("limit offspring laws") {
  const auto c = limit_offspring_laws(SurvivalModel::constant(1.5), 30);
  for (int n = 0; n <= 30; ++n) CHECK(c.f.pmf[n] == doctest::Approx(poisson_pmf(n, 1.5)));

  const auto model = SurvivalModel::pareto(3.5, 1.0);
  const auto laws = limit_offspring_laws(model, 40);
  const auto& p = std::get<SurvivalModel::Pareto>(model.variant());
  for (int n : {0, 1, 3, 7, 15}) {
    // Density-side quadrature, independent of the quantile-side rule.
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double x) { return poisson_pmf(n, x) * (p.tau - 1.0) * p.c * std::pow(x, -p.tau); },
        1.0, INFINITY, 20, 1e-13);
    CHECK(laws.f.pmf[n] == doctest::Approx(oracle).epsilon(1e-9));
  }
  double s = laws.f.tail_mass;
  for (double v : laws.f.pmf) s += v;
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  double sg = laws.g.tail_mass;
  for (double v : laws.g.pmf) sg += v;
  CHECK(sg == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("s_nq") {
  const CapacitySequence s({1.0, 2.0, 3.0});
  CHECK(s_nq(s, 2.0) == doctest::Approx(14.0 / 3.0));
  CHECK(s_nq(s, 1.0) == doctest::Approx(s.mean()));
  CHECK(s_nq(CapacitySequence(std::vector<double>(3, 1.7)), 2.3) ==
        doctest::Approx(std::pow(1.7, 2.3)));
  CHECK_THROWS_AS(s_nq(s, 0.0), std::domain_error);
}

TEST_CASE("integrated quantile distance") {
  const auto p = SurvivalModel::pareto(3.5, 1.0);
  const auto same = integrated_quantile_distance(p, p);
  CHECK(same.via_quantiles == doctest::Approx(0.0));
  CHECK(same.via_survivals == doctest::Approx(0.0));

  const auto c = integrated_quantile_distance(SurvivalModel::constant(2.0),
                                              SurvivalModel::constant(3.0));
  CHECK(c.via_quantiles == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(c.via_survivals == doctest::Approx(1.0).epsilon(1e-10));

  const auto q = SurvivalModel::pareto(3.5, 2.0);
  const auto d = integrated_quantile_distance(p, q);
  // Same τ: the quantile gap is (2^{0.4} - 1) u^{-0.4}, integrating to
  // (2^{0.4} - 1) / 0.6.
  CHECK(d.via_quantiles == doctest::Approx((std::pow(2.0, 0.4) - 1.0) / 0.6).epsilon(1e-9));
  CHECK(std::abs(d.via_quantiles - d.via_survivals) < 1e-6);

  const auto crossing = integrated_quantile_distance(SurvivalModel::pareto(3.2, 1.0),
                                                     SurvivalModel::pareto(4.5, 3.0));
  CHECK(std::abs(crossing.via_quantiles - crossing.via_survivals) < 1e-6);

  const auto mixed = integrated_quantile_distance(
      SurvivalModel::table({{0.0, 1.0}, {1.0, 0.5}, {2.0, 0.2}, {4.0, 0.0}}), p);
  CHECK(std::abs(mixed.via_quantiles - mixed.via_survivals) < 1e-6);
}

TEST_CASE("capacity csv round trip") {
  const auto s = iid_capacities(SurvivalModel::figure1(), 25, 3);
  std::stringstream ss;
  write_capacities_csv(ss, s);
  CHECK(ss.str().rfind("index,lambda\n1,", 0) == 0);
  const auto back = read_capacities_csv(ss);
  CHECK(std::equal(s.values().begin(), s.values().end(), back.values().begin()));

  std::stringstream commented("# manifest=0 seed=1\nindex,lambda\n1,2.5\n# trailer\n2,1.5\n");
  CHECK(read_capacities_csv(commented).values()[1] == 1.5);

  std::stringstream bad("index,lambda\n2,1.0\n");
  CHECK_THROWS_AS(read_capacities_csv(bad), std::invalid_argument);
  std::stringstream neg("index,lambda\n1,-1.0\n");
  CHECK_THROWS_AS(read_capacities_csv(neg), std::invalid_argument);
}
