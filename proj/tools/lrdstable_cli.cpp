// Command-line front end: path generation, CDF and coefficient evaluation,
// the long-memory KS test and Monte Carlo tables.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrdstable/coeff_cache.hpp"
#include "lrdstable/empirical_process.hpp"
#include "lrdstable/errors.hpp"
#include "lrdstable/gof_test.hpp"
#include "lrdstable/hermite_expansion.hpp"
#include "lrdstable/lrd_gaussian.hpp"
#include "lrdstable/mc_harness.hpp"
#include "lrdstable/stable_core.hpp"

using namespace lrdstable;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Output goes to the named file, or to stdout when the name is empty or "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw InvalidArgument("cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

// Reads one numeric column. A header row selects the column named "x" when
// present, otherwise the last column; headerless files use the last column.
std::vector<double> read_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open input file " + path);
    std::vector<double> values;
    std::string line;
    long column = -1;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (first) {
            first = false;
            char* end = nullptr;
            std::strtod(cells.back().c_str(), &end);
            if (end == cells.back().c_str()) {
                column = static_cast<long>(cells.size()) - 1;
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    if (cells[i] == "x") column = static_cast<long>(i);
                }
                continue;
            }
        }
        const auto idx = column < 0 ? cells.size() - 1 : static_cast<std::size_t>(column);
        if (idx >= cells.size()) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": missing column");
        }
        char* end = nullptr;
        const double v = std::strtod(cells[idx].c_str(), &end);
        if (end == cells[idx].c_str()) {
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": not a number");
        }
        values.push_back(v);
    }
    return values;
}

void report_runtime(const char* what, std::chrono::steady_clock::time_point start) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "%s finished in %.2f s\n", what, s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long-memory stable sequences and their empirical process"};
    app.require_subcommand(1);
    // Configuration files are read by the top-level app; fallthrough lets
    // "mc-table --config FILE" reach it. Keys live under a [mc-table] section.
    app.fallthrough();
    app.set_config("--config", "", "INI/TOML file; mc-table keys go under a [mc-table] section");

    // generate-gaussian
    double gg_d = 0.5;
    std::size_t gg_n = 0;
    std::uint64_t gg_seed = 1;
    bool gg_pair = false;
    std::string gg_out;
    auto* gg = app.add_subcommand("generate-gaussian", "Simulate an LRD standard Gaussian path");
    gg->add_option("--d", gg_d, "Memory exponent D in (0, 1)")->required();
    gg->add_option("--n", gg_n, "Path length")->required();
    gg->add_option("--seed", gg_seed, "Seed")->required();
    gg->add_flag("--pair", gg_pair, "Emit two independent paths");
    gg->add_option("--out", gg_out, "Output CSV (stdout if omitted)");

    // generate-stable
    double gs_alpha = 0.5, gs_beta2 = 0.5, gs_d = 0.5;
    std::size_t gs_n = 0;
    std::uint64_t gs_seed = 1;
    std::string gs_out;
    auto* gs = app.add_subcommand("generate-stable", "Simulate a long-memory stable sequence");
    gs->add_option("--alpha", gs_alpha, "Stability index in (0, 2)")->required();
    gs->add_option("--beta2", gs_beta2, "Asymmetry in [-1, 1]")->required();
    gs->add_option("--d", gs_d, "Memory exponent D in (0, 1)")->required();
    gs->add_option("--n", gs_n, "Sequence length")->required();
    gs->add_option("--seed", gs_seed, "Seed")->required();
    gs->add_option("--out", gs_out, "Output CSV (stdout if omitted)");

    // cdf
    double cdf_alpha = 0.5, cdf_beta2 = 0.5;
    std::vector<double> cdf_x;
    auto* cdf = app.add_subcommand("cdf", "Evaluate the standard stable CDF");
    cdf->add_option("--alpha", cdf_alpha)->required();
    cdf->add_option("--beta2", cdf_beta2)->required();
    cdf->add_option("--x", cdf_x, "Comma-separated evaluation points")->required()->delimiter(',');

    // coeffs
    double co_alpha = 0.5, co_beta2 = 0.5, co_xmin = -5.0, co_xmax = 5.0, co_tol = 1e-10;
    std::size_t co_points = 101;
    unsigned co_workers = 1;
    std::string co_out;
    auto* co = app.add_subcommand("coeffs", "Tabulate the rank-one Hermite coefficients");
    co->add_option("--alpha", co_alpha)->required();
    co->add_option("--beta2", co_beta2)->required();
    co->add_option("--xmin", co_xmin)->capture_default_str();
    co->add_option("--xmax", co_xmax)->capture_default_str();
    co->add_option("--points", co_points)->capture_default_str();
    co->add_option("--tol", co_tol)->capture_default_str();
    co->add_option("--workers", co_workers)->envname("LRDSTABLE_WORKERS")->capture_default_str();
    co->add_option("--out", co_out, "Output CSV (stdout if omitted)");

    // c0
    double c0_alpha = 0.5, c0_beta2 = 0.5;
    auto* c0cmd = app.add_subcommand("c0", "Supremum of the coefficient norm");
    c0cmd->add_option("--alpha", c0_alpha)->required();
    c0cmd->add_option("--beta2", c0_beta2)->required();

    // ks and test share inputs
    std::string ks_input;
    double ks_alpha = 0.5, ks_beta2 = 0.5, ks_d = 0.5, ks_level = 0.05;
    bool ks_json = false;
    auto* ks = app.add_subcommand("ks", "KS statistic and its long-memory normalization");
    auto* tst = app.add_subcommand("test", "Asymptotic KS goodness-of-fit test");
    for (auto* sub : {ks, tst}) {
        sub->add_option("--input", ks_input, "CSV with the sample (column x or last column)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--alpha", ks_alpha)->required();
        sub->add_option("--beta2", ks_beta2)->required();
        sub->add_option("--d", ks_d, "Memory exponent D in (0, 1)")->required();
    }
    tst->add_option("--level", ks_level, "Significance level")->capture_default_str();
    tst->add_flag("--json", ks_json, "Emit the report as JSON");

    // mc-table
    ExperimentSpec mc;
    mc.ds = {0.2, 0.5, 0.8};
    mc.ns = {128, 256, 512, 1024, 2048};
    std::string mc_out;
    bool mc_json = false;
    auto* mct = app.add_subcommand("mc-table", "Monte Carlo table of the normalized KS statistic");
    mct->add_option("--alpha", mc.alpha)->required();
    mct->add_option("--beta2", mc.beta2)->required();
    mct->add_option("--d-list", mc.ds, "Memory exponents")->delimiter(',')->capture_default_str();
    mct->add_option("--n-list", mc.ns, "Sample sizes")->delimiter(',')->capture_default_str();
    mct->add_option("--reps", mc.replications, "Replications per cell")->capture_default_str();
    mct->add_option("--seed", mc.master_seed, "Master seed")->capture_default_str();
    mct->add_option("--gammas", mc.gammas, "Coverage levels")->delimiter(',')->capture_default_str();
    mct->add_option("--workers", mc.workers, "Worker threads")
        ->envname("LRDSTABLE_WORKERS")
        ->capture_default_str();
    mct->add_option("--out", mc_out, "Output file (stdout if omitted)");
    mct->add_flag("--json", mc_json, "Write JSON with metadata instead of CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gg) {
            const LrdModel model(gg_d);
            Output out(gg_out);
            auto& os = out.stream();
            if (gg_pair) {
                const auto p = simulate_lrd_pair(model, gg_n, gg_seed);
                os << "index,z1,z2\n";
                for (std::size_t i = 0; i < gg_n; ++i) {
                    os << i << ',' << fmt(p.z1[i]) << ',' << fmt(p.z2[i]) << '\n';
                }
            } else {
                const auto z = simulate_lrd_path(model, gg_n, gg_seed);
                os << "index,z1\n";
                for (std::size_t i = 0; i < gg_n; ++i) os << i << ',' << fmt(z[i]) << '\n';
            }
        } else if (*gs) {
            validate_standard(gs_alpha, gs_beta2);
            const LrdModel model(gs_d);
            const auto p = simulate_lrd_pair(model, gs_n, gs_seed);
            Output out(gs_out);
            auto& os = out.stream();
            os << "index,x\n";
            for (std::size_t i = 0; i < gs_n; ++i) {
                os << i << ',' << fmt(cms_transform(p.z1[i], p.z2[i], gs_alpha, gs_beta2)) << '\n';
            }
        } else if (*cdf) {
            std::cout << "x,F\n";
            for (double x : cdf_x) {
                std::cout << fmt(x) << ',' << fmt(stable_cdf(x, cdf_alpha, cdf_beta2)) << '\n';
            }
        } else if (*co) {
            const auto start = std::chrono::steady_clock::now();
            const auto xs = linear_grid(co_xmin, co_xmax, co_points);
            const auto t =
                CoeffCache::global().table(co_alpha, co_beta2, xs, co_tol, co_workers);
            Output out(co_out);
            auto& os = out.stream();
            os << "x,J10,J01,err10,err01\n";
            for (std::size_t i = 0; i < xs.size(); ++i) {
                os << fmt(t.xs[i]) << ',' << fmt(t.j10[i]) << ',' << fmt(t.j01[i]) << ','
                   << fmt(t.err10[i]) << ',' << fmt(t.err01[i]) << '\n';
            }
            report_runtime("coeffs", start);
        } else if (*c0cmd) {
            const auto r = CoeffCache::global().c0(c0_alpha, c0_beta2);
            std::cout << "c0,x_star\n" << fmt(r.value) << ',' << fmt(r.x_star) << '\n';
        } else if (*ks) {
            const Sample s(read_column(ks_input));
            const auto r = ks_test(s, ks_alpha, ks_beta2, ks_d, 0.05);
            std::cout << "K_n,d_n,c0,K_n_normalized\n"
                      << fmt(r.kn) << ',' << fmt(r.dn) << ',' << fmt(r.c0) << ',' << fmt(r.kstar)
                      << '\n';
        } else if (*tst) {
            const Sample s(read_column(ks_input));
            const auto r = ks_test(s, ks_alpha, ks_beta2, ks_d, ks_level);
            if (ks_json) {
                std::cout << to_json(r) << '\n';
            } else {
                std::cout << "K_n = " << fmt(r.kn) << "\nd_n = " << fmt(r.dn)
                          << "\nc0 = " << fmt(r.c0) << "\nK* = " << fmt(r.kstar)
                          << "\np-value = " << fmt(r.p_value) << "\nlevel = " << fmt(r.level)
                          << "\ndecision = " << (r.reject ? "reject" : "do not reject") << '\n';
            }
        } else if (*mct) {
            // CLI11 converts an empty list argument to a single zero; an empty
            // list means an empty table.
            const auto given_empty = [&](const char* name, auto& values) {
                const auto& raw = mct->get_option(name)->results();
                if (raw.size() == 1 && raw.front().empty()) values.clear();
            };
            given_empty("--d-list", mc.ds);
            given_empty("--n-list", mc.ns);
            const auto result = run_experiment(mc);
            Output out(mc_out);
            if (mc_json) {
                write_json(out.stream(), result);
            } else {
                write_csv(out.stream(), result);
            }
            std::fprintf(stderr, "mc-table finished in %.2f s (%zu cells, N = %zu)\n",
                         result.runtime_seconds, result.rows.size(), mc.replications);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
