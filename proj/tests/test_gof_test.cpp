#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "lrdstable/coeff_cache.hpp"
#include "lrdstable/errors.hpp"
#include "lrdstable/gof_test.hpp"
#include "lrdstable/hermite_expansion.hpp"
#include "lrdstable/quadrature.hpp"
#include "lrdstable/stable_core.hpp"

using namespace lrdstable;

TEST_CASE("half-normal quantiles at the table levels") {
    CHECK(half_normal_quantile(0.95) == doctest::Approx(1.959964).epsilon(1e-6));
    CHECK(half_normal_quantile(0.9) == doctest::Approx(1.644854).epsilon(1e-6));
    CHECK(half_normal_quantile(0.8) == doctest::Approx(1.281552).epsilon(1e-6));
    CHECK(std::round(half_normal_quantile(0.8) * 100) / 100 == doctest::Approx(1.28));
    CHECK(std::round(half_normal_quantile(0.9) * 1000) / 1000 == doctest::Approx(1.645));
    CHECK(std::round(half_normal_quantile(0.95) * 100) / 100 == doctest::Approx(1.96));
    CHECK(half_normal_cdf(0.0) == 0.0);
    CHECK(half_normal_cdf(-1.0) == 0.0);
    CHECK_THROWS_AS(half_normal_quantile(1.0), InvalidArgument);
    CHECK_THROWS_AS(half_normal_quantile(0.0), InvalidArgument);
}

TEST_CASE("half-normal cdf inverts the quantile") {
    for (double g : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        CHECK(std::abs(half_normal_cdf(half_normal_quantile(g)) - g) < 1e-10);
    }
}

TEST_CASE("half-normal moments") {
    CHECK(half_normal_mean() == doctest::Approx(0.7979).epsilon(1e-4));
    CHECK(half_normal_sd() == doctest::Approx(0.6028).epsilon(1e-4));
    // Check against quadrature of the |Z| density 2 phi(k) on [0, 40].
    const auto rule = quadrature::gauss_legendre(120);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double k = 20.0 * (rule.nodes[i] + 1.0);
        const double w = 20.0 * rule.weights[i] * 2.0 * std::exp(-0.5 * k * k) / std::sqrt(2.0 * M_PI);
        m1 += w * k;
        m2 += w * k * k;
    }
    CHECK(m1 == doctest::Approx(half_normal_mean()).epsilon(1e-12));
    CHECK(std::sqrt(m2 - m1 * m1) == doctest::Approx(half_normal_sd()).epsilon(1e-12));
}

TEST_CASE("report p-values and decisions") {
    const auto zero = ks_report(0.0, 1.0, 1.0, 0.05);
    CHECK(zero.p_value == 1.0);
    CHECK_FALSE(zero.reject);
    const auto edge = ks_report(1.959963984540054, 1.0, 1.0, 0.05);
    CHECK(edge.p_value == doctest::Approx(0.05).epsilon(1e-12));
    const auto r = ks_report(0.3, 0.2, 0.5, 0.05);
    CHECK(r.kstar == doctest::Approx(3.0));
    CHECK(r.reject);
    CHECK(r.p_value == doctest::Approx(1.0 - half_normal_cdf(3.0)));
    CHECK_THROWS_AS(ks_report(0.1, 1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("decision is monotone in the statistic") {
    for (double level : {0.01, 0.05, 0.2}) {
        bool rejected = false;
        double prev_p = 1.0;
        for (double k = 0.0; k <= 6.0; k += 0.01) {
            const auto r = ks_report(k, 1.0, 1.0, level);
            CHECK(r.p_value <= prev_p);
            CHECK(r.p_value >= 0.0);
            CHECK(r.p_value <= 1.0);
            CHECK(r.reject == (r.p_value < level));
            if (rejected) CHECK(r.reject);
            rejected = r.reject;
            prev_p = r.p_value;
        }
        CHECK(rejected);
    }
}

TEST_CASE("ks_test composes the pieces") {
    const Sample s({0.2, -1.0, 3.0, 0.9, 12.0, -0.4, 0.1, 2.2});
    const auto r = ks_test(s, 0.5, 0.5, 0.8, 0.05);
    const double kn = ks_statistic(s, [](double x) { return stable_cdf(x, 0.5, 0.5); });
    CHECK(r.kn == kn);
    CHECK(r.dn == d_nm(1, LrdModel(0.8), s.size()));
    CHECK(r.c0 == cached_c0(0.5, 0.5));
    CHECK(r.kstar == doctest::Approx(kn / (r.dn * r.c0)).epsilon(1e-15));
    CHECK(r.level == 0.05);
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j.at("kstar").get<double>() == r.kstar);
    CHECK(j.at("reject").get<bool>() == r.reject);
    CHECK(j.at("p_value").get<double>() == r.p_value);
}

TEST_CASE("empirical standardization") {
    CHECK_THROWS_AS(standardize_ksd({1.0, 1.0, 1.0}), DegenerateSample);
    CHECK_THROWS_AS(standardize_ksd({1.0}), InvalidArgument);
    Rng rng(5);
    std::gamma_distribution<double> g(2.0, 0.4);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> k(10 + 50 * trial);
        for (auto& v : k) v = g(rng);
        const auto out = standardize_ksd(k);
        const double n = static_cast<double>(out.size());
        const double mean = std::accumulate(out.begin(), out.end(), 0.0) / n;
        double ss = 0.0;
        for (double v : out) ss += (v - mean) * (v - mean);
        CHECK(mean == doctest::Approx(half_normal_mean()).epsilon(1e-12));
        CHECK(std::sqrt(ss / (n - 1.0)) == doctest::Approx(half_normal_sd()).epsilon(1e-12));
        // Affine and order preserving
        for (std::size_t i = 1; i < k.size(); ++i) {
            CHECK(((k[i] < k[0]) == (out[i] < out[0])));
        }
    }
}
