#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lrdstable/seeding.hpp"

namespace lrdstable {

/// Autocovariance families for the driving Gaussian sequences.
enum class CovarianceFamily {
    /// r(k) = (1 + k^2)^(-D/2)
    PowerDecay,
};

/// Long-range-dependent covariance model with memory exponent 0 < D < 1.
class LrdModel {
public:
    explicit LrdModel(double memory_exponent,
                      CovarianceFamily family = CovarianceFamily::PowerDecay);

    double memory_exponent() const { return d_; }
    CovarianceFamily family() const { return family_; }

    /// r(k) for a nonnegative lag.
    double autocovariance(double lag) const;

    /// L(k) = k^D r(k); tends to 1 for the power-decay family.
    double slowly_varying(double k) const;

    bool operator==(const LrdModel&) const = default;

private:
    double d_;
    CovarianceFamily family_;
};

double autocovariance(const LrdModel& model, std::size_t lag);

enum class SimulationMethod { Auto, CirculantEmbedding, ToeplitzCholesky };

/// Exact sampler of a stationary N(0, 1) sequence of fixed length with the
/// model's autocovariance. Construction does all per-(model, n) work; drawing
/// is const and may run concurrently from several threads.
class LrdPathSampler {
public:
    LrdPathSampler(const LrdModel& model, std::size_t n,
                   SimulationMethod method = SimulationMethod::Auto);
    ~LrdPathSampler();
    LrdPathSampler(LrdPathSampler&&) noexcept;
    LrdPathSampler& operator=(LrdPathSampler&&) noexcept;
    LrdPathSampler(const LrdPathSampler&) = delete;
    LrdPathSampler& operator=(const LrdPathSampler&) = delete;

    std::size_t size() const;
    const LrdModel& model() const;
    /// Method actually in use after the Auto fallback chain.
    SimulationMethod method() const;
    /// Circulant size (0 for the Cholesky route).
    std::size_t embedding_size() const;

    std::vector<double> sample(std::uint64_t seed) const;
    void sample_into(std::span<double> out, Rng& rng) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct GaussianPairPath {
    std::vector<double> z1;
    std::vector<double> z2;
    LrdModel model;
    std::uint64_t seed;
};

/// Deterministic in (model, n, seed).
std::vector<double> simulate_lrd_path(const LrdModel& model, std::size_t n, std::uint64_t seed);

/// Two independent paths drawn from substreams of seed.
GaussianPairPath simulate_lrd_pair(const LrdModel& model, std::size_t n, std::uint64_t seed);
GaussianPairPath simulate_lrd_pair(const LrdPathSampler& sampler, std::uint64_t seed);

}  // namespace lrdstable
