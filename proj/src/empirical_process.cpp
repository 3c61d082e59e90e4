#include "lrdstable/empirical_process.hpp"

#include "lrdstable/coeff_cache.hpp"
#include "lrdstable/errors.hpp"
#include "lrdstable/hermite_expansion.hpp"
#include "lrdstable/stable_core.hpp"

namespace lrdstable {

Sample::Sample(std::vector<double> values, std::optional<SampleProvenance> provenance)
    : values_(std::move(values)), provenance_(std::move(provenance)) {
    if (values_.empty()) {
        throw InvalidArgument("sample must contain at least one value");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InvalidArgument("sample value " + std::to_string(i) + " is not finite");
        }
    }
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
}

double edf(const Sample& sample, double x) {
    const auto& s = sample.sorted();
    const auto count = std::upper_bound(s.begin(), s.end(), x) - s.begin();
    return static_cast<double>(count) / static_cast<double>(s.size());
}

double ks_statistic(const Sample& sample, const CdfEvaluator& cdf) {
    return ks_statistic_sorted(sample.sorted(), cdf);
}

double normalized_ks_value(double kn, std::size_t n, double d, double c0) {
    return kn / (d_nm(1, LrdModel(d), n) * c0);
}

double normalized_ks(const Sample& sample, double alpha, double beta2, double d) {
    validate_standard(alpha, beta2);
    const LrdModel model(d);
    const double kn =
        ks_statistic(sample, [&](double x) { return stable_cdf(x, alpha, beta2); });
    return normalized_ks_value(kn, sample.size(), model.memory_exponent(),
                               cached_c0(alpha, beta2));
}

}  // namespace lrdstable
