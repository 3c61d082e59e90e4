#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lrdstable {

struct ExperimentSpec {
    double alpha = 0.5;
    double beta2 = 0.5;
    std::vector<double> ds;
    std::vector<std::size_t> ns;
    std::size_t replications = 5000;
    std::uint64_t master_seed = 1;
    std::vector<double> gammas{0.8, 0.9, 0.95};
    unsigned workers = 1;
};

/// InvalidArgument unless N >= 2, every D in (0, 1), every n >= 2 and every
/// gamma in (0, 1); DomainError for bad stable parameters.
void validate(const ExperimentSpec& spec);

struct TableRow {
    double d = 0.0;
    std::size_t n = 0;
    /// Replications that entered the summary (N minus failures).
    std::size_t replications = 0;
    std::size_t failures = 0;
    double mean = 0.0;
    double sd = 0.0;
    /// Empirical P(K* <= z) and P(K^sd <= z), z = half_normal_quantile(gamma),
    /// in the order of spec.gammas.
    std::vector<double> coverage_kstar;
    std::vector<double> coverage_ksd;
};

/// Seed of replication i of cell (D, n); independent of N and of workers.
std::uint64_t replication_seed(std::uint64_t master, double d, std::size_t n, std::size_t i);

/// Runs the N replications of one (D, n) cell: simulate the Gaussian pair,
/// apply the CMS transform, compute K* = K_n / (d_{n,1} c0) against the null
/// CDF, then summarize. Aborts with Error if more than 0.1% of replications
/// fail.
TableRow run_cell(const ExperimentSpec& spec, double d, std::size_t n);

/// Raw K* values of a cell (failed replications are NaN), for diagnostics.
std::vector<double> cell_kstars(const ExperimentSpec& spec, double d, std::size_t n);

struct ExperimentResult {
    ExperimentSpec spec;
    double c0 = 0.0;
    double c0_x = 0.0;
    /// Upper bound sqrt(0.25 / N) on the binomial standard error of every
    /// coverage estimate.
    double coverage_se_bound = 0.0;
    std::vector<TableRow> rows;
    /// Wall-clock seconds; not written to output files.
    double runtime_seconds = 0.0;
};

/// All (D, n) cells in D-major order. Deterministic in the spec except for
/// runtime_seconds; results do not depend on spec.workers.
ExperimentResult run_experiment(const ExperimentSpec& spec);

void write_csv(std::ostream& out, const ExperimentResult& result);
void write_json(std::ostream& out, const ExperimentResult& result);

}  // namespace lrdstable
