#include "lrdstable/lrd_gaussian.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include "lrdstable/errors.hpp"

namespace lrdstable {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr double kNegativeMassTolerance = 1e-12;
constexpr int kMaxEmbeddingDoublings = 6;
constexpr std::size_t kMaxCholeskySize = 4096;

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

}  // namespace

LrdModel::LrdModel(double memory_exponent, CovarianceFamily family)
    : d_(memory_exponent), family_(family) {
    if (!(memory_exponent > 0.0 && memory_exponent < 1.0)) {
        throw InvalidArgument("LrdModel: memory exponent D must lie in (0, 1), got " +
                              std::to_string(memory_exponent));
    }
}

double LrdModel::autocovariance(double lag) const {
    return std::pow(1.0 + lag * lag, -0.5 * d_);
}

double LrdModel::slowly_varying(double k) const {
    return std::pow(k, d_) * autocovariance(k);
}

double autocovariance(const LrdModel& model, std::size_t lag) {
    return model.autocovariance(static_cast<double>(lag));
}

struct LrdPathSampler::Impl {
    LrdModel model;
    std::size_t n;
    SimulationMethod method = SimulationMethod::CirculantEmbedding;

    // circulant route
    std::size_t m = 0;
    std::vector<double> scale;  // sqrt(lambda_j / m)
    fftw_plan plan = nullptr;

    // Toeplitz route: Durbin-Levinson prediction coefficients, row t holds
    // phi_{t,1..t}; innovation variances v_t.
    std::vector<std::vector<double>> phi;
    std::vector<double> innovation_sd;

    Impl(const LrdModel& mdl, std::size_t len) : model(mdl), n(len) {}

    ~Impl() {
        if (plan != nullptr) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }

    bool try_circulant(std::size_t size) {
        // First row of the circulant: r(0..m/2), r(m/2-1..1).
        std::vector<std::complex<double>> row(size);
        for (std::size_t j = 0; j < size; ++j) {
            const std::size_t lag = j <= size / 2 ? j : size - j;
            row[j] = model.autocovariance(static_cast<double>(lag));
        }
        std::vector<std::complex<double>> eig(size);
        fftw_plan p;
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            p = fftw_plan_dft_1d(static_cast<int>(size), reinterpret_cast<fftw_complex*>(row.data()),
                                 reinterpret_cast<fftw_complex*>(eig.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        }
        fftw_execute(p);
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(p);
        }
        double negative = 0.0;
        double total = 0.0;
        for (const auto& e : eig) {
            total += std::abs(e.real());
            if (e.real() < 0.0) negative += -e.real();
        }
        if (negative > kNegativeMassTolerance * total) {
            return false;
        }
        m = size;
        scale.resize(size);
        for (std::size_t j = 0; j < size; ++j) {
            scale[j] = std::sqrt(std::max(eig[j].real(), 0.0) / static_cast<double>(size));
        }
        std::vector<std::complex<double>> a(size), b(size);
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(size), reinterpret_cast<fftw_complex*>(a.data()),
                                reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
        return true;
    }

    void setup_cholesky() {
        if (n > kMaxCholeskySize) {
            throw EmbeddingFailure("circulant embedding failed and n = " + std::to_string(n) +
                                   " exceeds the Toeplitz fallback limit");
        }
        phi.assign(n, {});
        innovation_sd.assign(n, 0.0);
        double v = model.autocovariance(0.0);
        innovation_sd[0] = std::sqrt(v);
        std::vector<double> prev;
        for (std::size_t t = 1; t < n; ++t) {
            double acc = model.autocovariance(static_cast<double>(t));
            for (std::size_t j = 1; j < t; ++j) {
                acc -= prev[j - 1] * model.autocovariance(static_cast<double>(t - j));
            }
            const double k = acc / v;
            std::vector<double> cur(t);
            for (std::size_t j = 1; j < t; ++j) {
                cur[j - 1] = prev[j - 1] - k * prev[t - j - 1];
            }
            cur[t - 1] = k;
            v *= (1.0 - k * k);
            if (!(v > 1e-14)) {
                throw NonPositiveDefinite("Toeplitz covariance is numerically singular at order " +
                                          std::to_string(t));
            }
            innovation_sd[t] = std::sqrt(v);
            phi[t] = cur;
            prev = std::move(cur);
        }
        method = SimulationMethod::ToeplitzCholesky;
    }
};

LrdPathSampler::LrdPathSampler(const LrdModel& model, std::size_t n, SimulationMethod method)
    : impl_(std::make_unique<Impl>(model, n)) {
    if (n == 0) {
        throw InvalidArgument("LrdPathSampler: path length must be at least 1");
    }
    if (method == SimulationMethod::ToeplitzCholesky) {
        impl_->setup_cholesky();
        return;
    }
    std::size_t size = std::max<std::size_t>(2, next_pow2(2 * (n - 1)));
    for (int attempt = 0; attempt <= kMaxEmbeddingDoublings; ++attempt, size *= 2) {
        if (impl_->try_circulant(size)) {
            impl_->method = SimulationMethod::CirculantEmbedding;
            return;
        }
    }
    if (method == SimulationMethod::CirculantEmbedding) {
        throw EmbeddingFailure("circulant embedding has negative eigenvalues for n = " +
                               std::to_string(n));
    }
    impl_->setup_cholesky();
}

LrdPathSampler::~LrdPathSampler() = default;
LrdPathSampler::LrdPathSampler(LrdPathSampler&&) noexcept = default;
LrdPathSampler& LrdPathSampler::operator=(LrdPathSampler&&) noexcept = default;

std::size_t LrdPathSampler::size() const { return impl_->n; }
const LrdModel& LrdPathSampler::model() const { return impl_->model; }
SimulationMethod LrdPathSampler::method() const { return impl_->method; }
std::size_t LrdPathSampler::embedding_size() const { return impl_->m; }

void LrdPathSampler::sample_into(std::span<double> out, Rng& rng) const {
    if (out.size() != impl_->n) {
        throw InvalidArgument("LrdPathSampler::sample_into: output span has the wrong length");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Impl& s = *impl_;
    if (s.method == SimulationMethod::ToeplitzCholesky) {
        for (std::size_t t = 0; t < s.n; ++t) {
            double mean = 0.0;
            for (std::size_t j = 1; j <= t; ++j) {
                mean += s.phi[t][j - 1] * out[t - j];
            }
            out[t] = mean + s.innovation_sd[t] * gauss(rng);
        }
        return;
    }
    // Real part of F(sqrt(lambda/m) * (xi + i eta)) has covariance exactly C.
    std::vector<std::complex<double>> in(s.m), res(s.m);
    for (std::size_t j = 0; j < s.m; ++j) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        in[j] = {s.scale[j] * re, s.scale[j] * im};
    }
    fftw_execute_dft(s.plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(res.data()));
    for (std::size_t t = 0; t < s.n; ++t) {
        out[t] = res[t].real();
    }
}

std::vector<double> LrdPathSampler::sample(std::uint64_t seed) const {
    std::vector<double> out(impl_->n);
    Rng rng(seed);
    sample_into(out, rng);
    return out;
}

std::vector<double> simulate_lrd_path(const LrdModel& model, std::size_t n, std::uint64_t seed) {
    return LrdPathSampler(model, n).sample(seed);
}

GaussianPairPath simulate_lrd_pair(const LrdPathSampler& sampler, std::uint64_t seed) {
    return GaussianPairPath{sampler.sample(derive_seed(seed, {kPathTag1})),
                            sampler.sample(derive_seed(seed, {kPathTag2})), sampler.model(), seed};
}

GaussianPairPath simulate_lrd_pair(const LrdModel& model, std::size_t n, std::uint64_t seed) {
    return simulate_lrd_pair(LrdPathSampler(model, n), seed);
}

}  // namespace lrdstable
