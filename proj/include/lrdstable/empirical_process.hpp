#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lrdstable/lrd_gaussian.hpp"

namespace lrdstable {

struct SampleProvenance {
    LrdModel model;
    std::uint64_t seed = 0;
};

/// Immutable finite sample. Construction rejects empty input and non-finite
/// values with InvalidArgument.
class Sample {
public:
    explicit Sample(std::vector<double> values,
                    std::optional<SampleProvenance> provenance = std::nullopt);

    std::size_t size() const { return values_.size(); }
    const std::vector<double>& values() const { return values_; }
    /// Ascending copy of the values, computed once.
    const std::vector<double>& sorted() const { return sorted_; }
    const std::optional<SampleProvenance>& provenance() const { return provenance_; }

private:
    std::vector<double> values_;
    std::vector<double> sorted_;
    std::optional<SampleProvenance> provenance_;
};

using CdfEvaluator = std::function<double(double)>;

/// (1/n) #{i : x_i <= x}.
double edf(const Sample& sample, double x);

/// sup_x |F_n(x) - F(x)| for continuous monotone F, evaluated exactly at the
/// order statistics. `sorted` must be ascending.
template <class Cdf>
double ks_statistic_sorted(std::span<const double> sorted, Cdf&& cdf) {
    const double n = static_cast<double>(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        sup = std::max(sup, std::max(std::abs(above), std::abs(below)));
    }
    return sup;
}

double ks_statistic(const Sample& sample, const CdfEvaluator& cdf);

/// K_n / (d_{n,1} c0) with c0 from the process-wide cache.
double normalized_ks(const Sample& sample, double alpha, double beta2, double d);

/// K_n / (d_{n,1} c0) from an already computed K_n.
double normalized_ks_value(double kn, std::size_t n, double d, double c0);

}  // namespace lrdstable
