#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ladder/rng.hpp"
#include "ladder/stats.hpp"

using namespace ladder;

TEST_CASE("gammq against known chi-squared points") {
    // chi2 survival at the median and classic critical values
    CHECK(chi2_sf(0.0, 1.0) == doctest::Approx(1.0));
    CHECK(chi2_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi2_sf(18.307038053275146, 10.0) == doctest::Approx(0.05).epsilon(1e-9));
    // Exponential special case: df = 2 gives exp(-x/2).
    for (double x : {0.1, 1.0, 5.0, 20.0})
        CHECK(chi2_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2.0)).epsilon(1e-12));
}

TEST_CASE("normal cdf") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-10));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-10));
}

TEST_CASE("ks test accepts normal and rejects uniform") {
    RngStream rng(7, 0);
    std::vector<double> normal, uniform;
    for (int i = 0; i < 2000; ++i) {
        normal.push_back(rng.normal());
        uniform.push_back(rng.uniform() * 2.0 - 1.0);
    }
    CHECK(ks_test_standard_normal(normal).p_value > 1e-3);
    CHECK(ks_test_standard_normal(uniform).p_value < 1e-6);
}

TEST_CASE("batch ratio on deterministic gaps has zero se") {
    BatchRatio r(2);
    std::vector<double> num(40, 3.0), den(40, 7.0);
    r.add_segment(num, den);
    const auto res = r.estimate();
    CHECK(res.ratio == doctest::Approx(3.0 / 7.0));
    CHECK(res.se == doctest::Approx(0.0));
}

TEST_CASE("batch ratio recovers a noisy mean ratio") {
    RngStream rng(8, 0);
    BatchRatio r(5);
    for (int seg = 0; seg < 20; ++seg) {
        std::vector<double> num, den;
        for (int i = 0; i < 50; ++i) {
            const double d = 2.0 + rng.uniform();
            den.push_back(d);
            num.push_back(0.5 * d + 0.1 * (rng.uniform() - 0.5));
        }
        r.add_segment(num, den);
    }
    const auto res = r.estimate();
    CHECK(std::fabs(res.ratio - 0.5) < 5.0 * res.se + 1e-3);
    CHECK(res.se > 0.0);
}

TEST_CASE("variance estimate on known distribution") {
    RngStream rng(9, 0);
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) xs.push_back(2.0 * rng.normal() + 1.0);
    const auto v = variance_with_se(xs);
    CHECK(std::fabs(v.var - 4.0) < 5.0 * v.se);
}

TEST_CASE("linear fit recovers slope") {
    std::vector<double> xs, ys;
    for (int i = 0; i < 50; ++i) {
        xs.push_back(i);
        ys.push_back(3.0 * i - 2.0);
    }
    const auto f = linear_fit(xs, ys);
    CHECK(f.slope == doctest::Approx(3.0));
    CHECK(f.intercept == doctest::Approx(-2.0));
    CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("binning by expected count") {
    std::vector<double> probs = {0.5, 0.2, 0.1, 0.1, 0.05, 0.03, 0.02};
    const Binning b = bin_by_expected_count(probs, 100.0, 10.0);
    CHECK(b.n_bins >= 2);
    std::vector<double> mass(static_cast<std::size_t>(b.n_bins), 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i)
        mass[static_cast<std::size_t>(b.bin_of_cell[i])] += probs[i] * 100.0;
    for (double m : mass) CHECK(m >= 10.0);
}

TEST_CASE("lag correlation of iid sequence is near zero") {
    RngStream rng(10, 0);
    std::vector<double> xs;
    for (int i = 0; i < 5000; ++i) xs.push_back(rng.uniform());
    const auto l = lag_correlation(xs, 1);
    CHECK(std::fabs(l.corr) < 4.0 * l.se);
}
