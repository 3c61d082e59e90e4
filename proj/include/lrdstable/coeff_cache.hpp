#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lrdstable/hermite_expansion.hpp"

namespace lrdstable {

/// Memoizes coefficient tables and c0 values, optionally persisting them as
/// JSON files under a directory. Entries are keyed by (alpha, beta2, grid,
/// tol). Lookups and inserts are serialized through one mutex; files are
/// written to a temporary name and renamed into place so concurrent
/// processes never observe a partial file.
class CoeffCache {
public:
    /// In-memory only.
    CoeffCache() = default;
    /// In-memory plus on-disk under `directory` (created on first write).
    explicit CoeffCache(std::filesystem::path directory);

    CoeffTable table(double alpha, double beta2, const std::vector<double>& xs, double tol,
                     unsigned workers = 1);
    C0Result c0(double alpha, double beta2, const C0Options& options = {});

    std::size_t memory_entries() const;
    const std::optional<std::filesystem::path>& directory() const { return directory_; }

    /// Process-wide instance. Persists under $LRDSTABLE_CACHE_DIR when set.
    static CoeffCache& global();

private:
    std::optional<std::filesystem::path> directory_;
    mutable std::mutex mutex_;
    std::map<std::string, CoeffTable> tables_;
    std::map<std::string, C0Result> c0s_;
};

/// Stable hex digest naming a cache entry.
std::string cache_key(const std::string& kind, double alpha, double beta2,
                      const std::vector<double>& xs, double tol);

/// c0 through the process-wide cache with default options.
double cached_c0(double alpha, double beta2);

}  // namespace lrdstable
