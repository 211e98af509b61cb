#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rgdist/stats.hpp"

using namespace rgdist;

TEST_CASE("mean and standard error") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const auto e = mean_se(x);
  CHECK(e.value == 2.5);
  // var = 5/3, se = sqrt(5/12).
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(mean_se(std::vector<double>{7.0}).se == 0.0);
  CHECK_THROWS_AS(mean_se(std::vector<double>{}), std::domain_error);
}

TEST_CASE("clustered ratio") {
  const std::vector<double> a{1.0, 3.0};
  const std::vector<double> n{2.0, 2.0};
  const auto e = clustered_ratio(a, n);
  CHECK(e.value == 1.0);
  // Residuals -1, +1: sqrt(2 * 2) / 4.
  CHECK(e.se == doctest::Approx(0.5));
  // Equal cluster sizes reduce to the standard error of the cluster means.
  const std::vector<double> a3{1.0, 4.0, 2.0, 5.0};
  const std::vector<double> n3{5.0, 5.0, 5.0, 5.0};
  const std::vector<double> m3{0.2, 0.8, 0.4, 1.0};
  CHECK(clustered_ratio(a3, n3).se == doctest::Approx(mean_se(m3).se));
  CHECK_THROWS_AS(clustered_ratio(std::vector<double>{1.0}, std::vector<double>{0.0}),
                  std::domain_error);
  CHECK_THROWS_AS(clustered_ratio(std::vector<double>{1.0}, std::vector<double>{}),
                  std::invalid_argument);
}

TEST_CASE("chi-square homogeneity") {
  // Reference values from scipy.stats.chi2_contingency(correction=False).
  {
    const std::vector<std::uint64_t> a{10, 20, 30}, b{15, 15, 40};
    const auto r = chi_square_homogeneity(a, b);
    CHECK(r.dof == 2);
    CHECK(r.statistic == doctest::Approx(2.3877551020408165).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.30304391468510006).epsilon(1e-10));
  }
  {
    const std::vector<std::uint64_t> a{50, 30, 12, 8}, b{40, 35, 15, 10};
    const auto r = chi_square_homogeneity(a, b);
    CHECK(r.dof == 3);
    CHECK(r.statistic == doctest::Approx(2.051282051282051).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.5618314314736095).epsilon(1e-10));
  }
  {
    // The three sparse right-hand categories fold into the second bin.
    const std::vector<std::uint64_t> a{30, 25, 3, 1, 1}, b{28, 27, 2, 2};
    const auto r = chi_square_homogeneity(a, b);
    CHECK(r.bins == 2);
    CHECK(r.statistic == doctest::Approx(0.07696103323720209).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.781458765354953).epsilon(1e-10));
  }
  {
    const std::vector<std::uint64_t> a{100}, b{80};
    const auto r = chi_square_homogeneity(a, b);
    CHECK(r.dof == 0);
    CHECK(r.p_value == 1.0);
  }
  CHECK_THROWS_AS(chi_square_homogeneity(std::vector<std::uint64_t>{0, 0},
                                         std::vector<std::uint64_t>{1, 2}),
                  std::domain_error);
}

TEST_CASE("histogram") {
  const std::vector<std::uint64_t> v{0, 3, 3, 1};
  CHECK(histogram(v) == std::vector<std::uint64_t>{1, 1, 0, 2});
  CHECK(histogram(std::vector<std::uint64_t>{}).empty());
}
