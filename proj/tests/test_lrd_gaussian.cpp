#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "lrdstable/errors.hpp"
#include "lrdstable/lrd_gaussian.hpp"

using namespace lrdstable;

namespace {

// Replication-averaged lag-k autocovariance about the known zero mean.
std::vector<double> mean_autocovariances(const LrdPathSampler& sampler, std::size_t reps,
                                         std::size_t max_lag, std::uint64_t master,
                                         std::vector<double>* se = nullptr) {
    const std::size_t n = sampler.size();
    std::vector<double> sum(max_lag + 1, 0.0);
    std::vector<double> sum2(max_lag + 1, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto z = sampler.sample(derive_seed(master, {r}));
        for (std::size_t k = 0; k <= max_lag; ++k) {
            double acc = 0.0;
            for (std::size_t t = 0; t + k < n; ++t) acc += z[t] * z[t + k];
            const double v = acc / static_cast<double>(n - k);
            sum[k] += v;
            sum2[k] += v * v;
        }
    }
    const double m = static_cast<double>(reps);
    if (se) se->assign(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        const double mean = sum[k] / m;
        if (se) (*se)[k] = std::sqrt((sum2[k] / m - mean * mean) / (m - 1.0));
        sum[k] = mean;
    }
    return sum;
}

}  // namespace

TEST_CASE("autocovariance closed form") {
    const LrdModel m(0.5);
    CHECK(autocovariance(m, 0) == 1.0);
    CHECK(autocovariance(m, 1) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-15));
    CHECK(autocovariance(m, 1) == doctest::Approx(0.840896).epsilon(1e-6));
    const LrdModel m2(0.2);
    CHECK(m2.slowly_varying(1e8) == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 1.0;
    for (std::size_t k = 1; k < 200; ++k) {
        const double r = autocovariance(m2, k);
        CHECK(r <= prev);
        CHECK(r > 0.0);
        prev = r;
    }
}

TEST_CASE("model rejects memory exponents outside (0, 1)") {
    CHECK_THROWS_AS(LrdModel(0.0), InvalidArgument);
    CHECK_THROWS_AS(LrdModel(1.0), InvalidArgument);
    CHECK_THROWS_AS(LrdModel(-0.3), InvalidArgument);
    CHECK_THROWS_AS(LrdModel(std::nan("")), InvalidArgument);
}

TEST_CASE("sampler edge sizes and method selection") {
    const LrdModel m(0.5);
    CHECK_THROWS_AS(LrdPathSampler(m, 0), InvalidArgument);
    CHECK_THROWS_AS(simulate_lrd_pair(m, 0, 1), InvalidArgument);
    const auto one = simulate_lrd_path(m, 1, 5);
    REQUIRE(one.size() == 1);
    CHECK(std::isfinite(one[0]));
    for (std::size_t n : {2u, 3u, 4u, 5u, 17u, 128u, 1000u}) {
        const LrdPathSampler s(m, n);
        CHECK(s.size() == n);
        CHECK(s.sample(3).size() == n);
    }
    const LrdPathSampler big(m, 2048);
    CHECK(big.method() == SimulationMethod::CirculantEmbedding);
    CHECK(big.embedding_size() >= 2 * 2047);
    const LrdPathSampler chol(m, 64, SimulationMethod::ToeplitzCholesky);
    CHECK(chol.method() == SimulationMethod::ToeplitzCholesky);
    CHECK(chol.embedding_size() == 0);
    CHECK_THROWS_AS(LrdPathSampler(m, 5000, SimulationMethod::ToeplitzCholesky), EmbeddingFailure);
}

TEST_CASE("paths are deterministic in the seed") {
    const LrdModel m(0.8);
    const auto a = simulate_lrd_path(m, 512, 11);
    const auto b = simulate_lrd_path(m, 512, 11);
    const auto c = simulate_lrd_path(m, 512, 12);
    CHECK(a == b);
    CHECK(a != c);
    const auto p = simulate_lrd_pair(m, 512, 11);
    CHECK(p.z1 != p.z2);
    CHECK(p.seed == 11);
    CHECK(p.model == m);
    const LrdPathSampler s(m, 512);
    const auto q = simulate_lrd_pair(s, 11);
    CHECK(q.z1 == p.z1);
    CHECK(q.z2 == p.z2);
}

TEST_CASE("lag-1 autocovariance at n = 2048") {
    const LrdModel m(0.5);
    const LrdPathSampler s(m, 2048);
    std::vector<double> se;
    const auto acv = mean_autocovariances(s, 200, 1, 2024, &se);
    CHECK(std::abs(acv[1] - 0.840896) < 3.0 * se[1]);
}

TEST_CASE("covariance fidelity at lags 0..20 for each memory exponent") {
    for (double d : {0.2, 0.5, 0.8}) {
        const LrdModel m(d);
        const LrdPathSampler s(m, 2048);
        std::vector<double> se;
        const auto acv = mean_autocovariances(s, 300, 20, 77, &se);
        for (std::size_t k = 0; k <= 20; ++k) {
            INFO("D = " << d << ", lag " << k);
            CHECK(std::abs(acv[k] - autocovariance(m, k)) < 4.0 * se[k]);
        }
    }
}

TEST_CASE("circulant and Cholesky routes agree in distribution") {
    const LrdModel m(0.3);
    const LrdPathSampler ce(m, 64, SimulationMethod::CirculantEmbedding);
    const LrdPathSampler ch(m, 64, SimulationMethod::ToeplitzCholesky);
    std::vector<double> se_ce;
    std::vector<double> se_ch;
    const auto a = mean_autocovariances(ce, 2000, 5, 1, &se_ce);
    const auto b = mean_autocovariances(ch, 2000, 5, 2, &se_ch);
    for (std::size_t k = 0; k <= 5; ++k) {
        CHECK(std::abs(a[k] - b[k]) < 4.0 * std::hypot(se_ce[k], se_ch[k]));
    }
}

TEST_CASE("marginal moments over replications") {
    // Pool the first coordinate across replications so draws are i.i.d. N(0, 1).
    const LrdModel m(0.2);
    const LrdPathSampler s(m, 128);
    const std::size_t reps = 500;
    std::vector<double> x1;
    std::vector<double> x2;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = simulate_lrd_pair(s, derive_seed(5, {r}));
        x1.push_back(p.z1[17]);
        x2.push_back(p.z2[100]);
    }
    for (const auto* x : {&x1, &x2}) {
        double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
        for (double v : *x) {
            m1 += v;
            m2 += v * v;
            m3 += v * v * v;
            m4 += v * v * v * v;
        }
        const double n = static_cast<double>(x->size());
        m1 /= n;
        m2 /= n;
        m3 /= n;
        m4 /= n;
        CHECK(std::abs(m1) < 3.0 / std::sqrt(n));
        CHECK(std::abs(m2 - 1.0) < 3.0 * std::sqrt(2.0 / n));
        CHECK(std::abs(m3) < 3.0 * std::sqrt(15.0 / n));
        CHECK(std::abs(m4 - 3.0) < 3.0 * std::sqrt(96.0 / n));
    }
}

TEST_CASE("sample variance of each path is close to one") {
    // E[path variance] = 1 - (sum of r over the n x n matrix)/n^2 for a
    // centred sample variance; we use the uncentred second moment, whose mean
    // is exactly 1.
    const LrdModel m(0.2);
    const LrdPathSampler s(m, 128);
    double sum1 = 0, sumsq1 = 0, sum2 = 0, sumsq2 = 0;
    const std::size_t reps = 500;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = simulate_lrd_pair(s, derive_seed(8, {r}));
        double v1 = 0, v2 = 0;
        for (std::size_t t = 0; t < 128; ++t) {
            v1 += p.z1[t] * p.z1[t];
            v2 += p.z2[t] * p.z2[t];
        }
        v1 /= 128.0;
        v2 /= 128.0;
        sum1 += v1;
        sumsq1 += v1 * v1;
        sum2 += v2;
        sumsq2 += v2 * v2;
    }
    const double n = static_cast<double>(reps);
    for (auto [s1, s2] : {std::pair{sum1, sumsq1}, std::pair{sum2, sumsq2}}) {
        const double mean = s1 / n;
        const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
        CHECK(std::abs(mean - 1.0) < 3.0 * se);
    }
}

TEST_CASE("pair independence: cross-covariance at lags -5..5") {
    const LrdModel m(0.5);
    const LrdPathSampler s(m, 1024);
    const std::size_t reps = 200;
    std::vector<double> sum(11, 0.0);
    std::vector<double> sum2(11, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = simulate_lrd_pair(s, derive_seed(31, {r}));
        for (int lag = -5; lag <= 5; ++lag) {
            double acc = 0.0;
            std::size_t count = 0;
            for (std::size_t t = 0; t < 1024; ++t) {
                const auto u = static_cast<long>(t) + lag;
                if (u < 0 || u >= 1024) continue;
                acc += p.z1[t] * p.z2[static_cast<std::size_t>(u)];
                ++count;
            }
            const double v = acc / static_cast<double>(count);
            sum[lag + 5] += v;
            sum2[lag + 5] += v * v;
        }
    }
    const double n = static_cast<double>(reps);
    for (std::size_t i = 0; i < 11; ++i) {
        const double mean = sum[i] / n;
        const double se = std::sqrt((sum2[i] / n - mean * mean) / (n - 1.0));
        CHECK(std::abs(mean) < 4.0 * se);
    }
}

TEST_CASE("lag-0 cross-correlation averaged over replications") {
    const LrdModel m(0.5);
    const LrdPathSampler s(m, 1024);
    double total = 0.0;
    const std::size_t reps = 100;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = simulate_lrd_pair(s, derive_seed(4242, {r}));
        double sxy = 0, sxx = 0, syy = 0;
        for (std::size_t t = 0; t < 1024; ++t) {
            sxy += p.z1[t] * p.z2[t];
            sxx += p.z1[t] * p.z1[t];
            syy += p.z2[t] * p.z2[t];
        }
        total += sxy / std::sqrt(sxx * syy);
    }
    CHECK(std::abs(total / static_cast<double>(reps)) < 3.0 / std::sqrt(1024.0));
}
