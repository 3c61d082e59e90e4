#include "lrdstable/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "lrdstable/coeff_cache.hpp"
#include "lrdstable/empirical_process.hpp"
#include "lrdstable/errors.hpp"
#include "lrdstable/gof_test.hpp"
#include "lrdstable/hermite_expansion.hpp"
#include "lrdstable/lrd_gaussian.hpp"
#include "lrdstable/seeding.hpp"
#include "lrdstable/stable_core.hpp"

namespace lrdstable {

namespace {

// Null CDF tables are expensive to build and shared by every cell with the
// same stable parameters.
std::shared_ptr<const StableCdfTable> null_cdf(double alpha, double beta2) {
    static std::mutex mutex;
    static std::vector<std::shared_ptr<const StableCdfTable>> tables;
    std::lock_guard lock(mutex);
    for (const auto& t : tables) {
        if (t->alpha() == alpha && t->beta2() == beta2) return t;
    }
    tables.push_back(std::make_shared<const StableCdfTable>(alpha, beta2));
    return tables.back();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string format_gamma(double g) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", g);
    return buf;
}

}  // namespace

void validate(const ExperimentSpec& spec) {
    validate_standard(spec.alpha, spec.beta2);
    if (spec.replications < 2) {
        throw InvalidArgument("experiment needs at least 2 replications");
    }
    for (double d : spec.ds) {
        if (!(d > 0.0 && d < 1.0)) throw InvalidArgument("every D must lie in (0, 1)");
    }
    for (std::size_t n : spec.ns) {
        if (n < 2) throw InvalidArgument("every sample size must be at least 2");
    }
    for (double g : spec.gammas) {
        if (!(g > 0.0 && g < 1.0)) throw InvalidArgument("coverage levels must lie in (0, 1)");
    }
}

std::uint64_t replication_seed(std::uint64_t master, double d, std::size_t n, std::size_t i) {
    return derive_seed(master, {tag_of(d), static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(i)});
}

std::vector<double> cell_kstars(const ExperimentSpec& spec, double d, std::size_t n) {
    validate(spec);
    if (!(d > 0.0 && d < 1.0) || n < 2) {
        throw InvalidArgument("cell needs 0 < D < 1 and n >= 2");
    }
    const auto cdf = null_cdf(spec.alpha, spec.beta2);
    const double c0 = cached_c0(spec.alpha, spec.beta2);
    const LrdModel model(d);
    const LrdPathSampler sampler(model, n);
    const double scale = d_nm(1, model, n) * c0;
    const std::size_t reps = spec.replications;

    std::vector<double> kstars(reps, std::numeric_limits<double>::quiet_NaN());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        std::vector<double> x(n);
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= reps) return;
            try {
                const auto pair = simulate_lrd_pair(sampler, replication_seed(spec.master_seed, d, n, i));
                bool finite = true;
                for (std::size_t t = 0; t < n; ++t) {
                    x[t] = cms_transform(pair.z1[t], pair.z2[t], spec.alpha, spec.beta2);
                    finite = finite && std::isfinite(x[t]);
                }
                if (!finite) continue;
                std::sort(x.begin(), x.end());
                kstars[i] = ks_statistic_sorted(x, *cdf) / scale;
            } catch (const std::exception&) {
                // left as NaN and counted as a failure
            }
        }
    };
    const unsigned workers = std::max(1u, spec.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return kstars;
}

TableRow run_cell(const ExperimentSpec& spec, double d, std::size_t n) {
    const auto all = cell_kstars(spec, d, n);
    std::vector<double> kstars;
    kstars.reserve(all.size());
    for (double k : all) {
        if (std::isfinite(k)) kstars.push_back(k);
    }
    TableRow row;
    row.d = d;
    row.n = n;
    row.failures = all.size() - kstars.size();
    row.replications = kstars.size();
    if (static_cast<double>(row.failures) > 0.001 * static_cast<double>(all.size())) {
        throw Error("cell D=" + format_double(d) + " n=" + std::to_string(n) + ": " +
                    std::to_string(row.failures) + " of " + std::to_string(all.size()) +
                    " replications failed");
    }
    const double count = static_cast<double>(kstars.size());
    double sum = 0.0;
    for (double k : kstars) sum += k;
    row.mean = sum / count;
    double ss = 0.0;
    for (double k : kstars) ss += (k - row.mean) * (k - row.mean);
    row.sd = std::sqrt(ss / (count - 1.0));
    const auto ksd = standardize_ksd(kstars);
    for (double g : spec.gammas) {
        const double z = half_normal_quantile(g);
        const auto below = [z](double k) { return k <= z; };
        row.coverage_kstar.push_back(
            static_cast<double>(std::count_if(kstars.begin(), kstars.end(), below)) / count);
        row.coverage_ksd.push_back(
            static_cast<double>(std::count_if(ksd.begin(), ksd.end(), below)) / count);
    }
    return row;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    const auto start = std::chrono::steady_clock::now();
    ExperimentResult result;
    result.spec = spec;
    result.coverage_se_bound = std::sqrt(0.25 / static_cast<double>(spec.replications));
    if (!spec.ds.empty() && !spec.ns.empty()) {
        const auto c0 = CoeffCache::global().c0(spec.alpha, spec.beta2);
        result.c0 = c0.value;
        result.c0_x = c0.x_star;
    }
    for (double d : spec.ds) {
        for (std::size_t n : spec.ns) {
            try {
                result.rows.push_back(run_cell(spec, d, n));
            } catch (const Error& e) {
                throw Error(std::string("experiment alpha=") + format_double(spec.alpha) +
                            " beta2=" + format_double(spec.beta2) + ": " + e.what());
            }
        }
    }
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

void write_csv(std::ostream& out, const ExperimentResult& result) {
    out << "D,n,N,failures,mean,sd";
    for (double g : result.spec.gammas) out << ",kstar_" << format_gamma(g);
    for (double g : result.spec.gammas) out << ",ksd_" << format_gamma(g);
    out << ",coverage_se_bound\n";
    for (const auto& row : result.rows) {
        out << format_gamma(row.d) << ',' << row.n << ',' << row.replications << ','
            << row.failures << ',' << format_double(row.mean) << ',' << format_double(row.sd);
        for (double c : row.coverage_kstar) out << ',' << format_double(c);
        for (double c : row.coverage_ksd) out << ',' << format_double(c);
        out << ',' << format_double(result.coverage_se_bound) << '\n';
    }
}

void write_json(std::ostream& out, const ExperimentResult& result) {
    using nlohmann::ordered_json;
    ordered_json rows = ordered_json::array();
    for (const auto& row : result.rows) {
        ordered_json kstar = ordered_json::object();
        ordered_json ksd = ordered_json::object();
        for (std::size_t g = 0; g < result.spec.gammas.size(); ++g) {
            kstar[format_gamma(result.spec.gammas[g])] = row.coverage_kstar[g];
            ksd[format_gamma(result.spec.gammas[g])] = row.coverage_ksd[g];
        }
        rows.push_back(ordered_json{{"D", row.d},
                                    {"n", row.n},
                                    {"N", row.replications},
                                    {"failures", row.failures},
                                    {"mean", row.mean},
                                    {"sd", row.sd},
                                    {"coverage_kstar", kstar},
                                    {"coverage_ksd", ksd}});
    }
    const ordered_json j{
        {"alpha", result.spec.alpha},
        {"beta2", result.spec.beta2},
        {"replications", result.spec.replications},
        {"master_seed", result.spec.master_seed},
        {"seed_rule", "derive_seed(master_seed, {bits(D), n, i}); paths use substreams 1 and 2"},
        {"c0", result.c0},
        {"c0_x", result.c0_x},
        {"coverage_se_bound", result.coverage_se_bound},
        {"rows", rows}};
    out << j.dump(2) << '\n';
}

}  // namespace lrdstable
