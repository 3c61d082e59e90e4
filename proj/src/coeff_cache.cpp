#include "lrdstable/coeff_cache.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <unistd.h>

#include <json.hpp>

#include "lrdstable/seeding.hpp"

namespace lrdstable {

namespace {

using nlohmann::json;

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<json> read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        return json::parse(in);
    } catch (const json::exception&) {
        return std::nullopt;  // unreadable entries are recomputed
    }
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
    std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid()) + "-" +
           hex(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp);
        out << j.dump();
        if (!out) {
            std::filesystem::remove(tmp);
            return;  // caching is best effort
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::filesystem::remove(tmp, ec);
}

json to_json(const CoeffTable& t) {
    return json{{"alpha", t.alpha}, {"beta2", t.beta2}, {"tol", t.tol},   {"xs", t.xs},
                {"j10", t.j10},     {"j01", t.j01},     {"err10", t.err10}, {"err01", t.err01}};
}

std::optional<CoeffTable> table_from_json(const json& j, const std::vector<double>& xs) {
    try {
        CoeffTable t;
        t.alpha = j.at("alpha").get<double>();
        t.beta2 = j.at("beta2").get<double>();
        t.tol = j.at("tol").get<double>();
        t.xs = j.at("xs").get<std::vector<double>>();
        t.j10 = j.at("j10").get<std::vector<double>>();
        t.j01 = j.at("j01").get<std::vector<double>>();
        t.err10 = j.at("err10").get<std::vector<double>>();
        t.err01 = j.at("err01").get<std::vector<double>>();
        const auto n = xs.size();
        if (t.xs != xs || t.j10.size() != n || t.j01.size() != n || t.err10.size() != n ||
            t.err01.size() != n) {
            return std::nullopt;
        }
        return t;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::string cache_key(const std::string& kind, double alpha, double beta2,
                      const std::vector<double>& xs, double tol) {
    std::uint64_t h = mix64(std::hash<std::string>{}(kind));
    h = mix64(h ^ tag_of(alpha));
    h = mix64(h ^ tag_of(beta2));
    h = mix64(h ^ tag_of(tol));
    h = mix64(h ^ xs.size());
    for (double x : xs) h = mix64(h ^ tag_of(x));
    return kind + "-" + hex(h);
}

CoeffCache::CoeffCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

CoeffTable CoeffCache::table(double alpha, double beta2, const std::vector<double>& xs,
                             double tol, unsigned workers) {
    const auto key = cache_key("table", alpha, beta2, xs, tol);
    std::lock_guard lock(mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
    if (directory_) {
        if (auto j = read_json(*directory_ / (key + ".json"))) {
            if (auto t = table_from_json(*j, xs)) {
                tables_.emplace(key, *t);
                return *t;
            }
        }
    }
    auto t = build_coeff_table(alpha, beta2, xs, tol, workers);
    if (directory_) write_json_atomic(*directory_ / (key + ".json"), to_json(t));
    tables_.emplace(key, t);
    return t;
}

C0Result CoeffCache::c0(double alpha, double beta2, const C0Options& options) {
    const std::vector<double> opts{options.x_max_initial, options.tail_threshold,
                                   options.x_max_limit, options.points_per_unit};
    const auto key = cache_key("c0", alpha, beta2, opts, options.tol);
    std::lock_guard lock(mutex_);
    if (auto it = c0s_.find(key); it != c0s_.end()) return it->second;
    if (directory_) {
        if (auto j = read_json(*directory_ / (key + ".json"))) {
            try {
                C0Result r;
                r.value = j->at("c0").get<double>();
                r.x_star = j->at("x_star").get<double>();
                r.x_max = j->at("x_max").get<double>();
                r.grid_points = j->at("grid_points").get<std::size_t>();
                c0s_.emplace(key, r);
                return r;
            } catch (const json::exception&) {
            }
        }
    }
    const auto r = lrdstable::c0(alpha, beta2, options);
    if (directory_) {
        write_json_atomic(*directory_ / (key + ".json"),
                          json{{"alpha", alpha},
                               {"beta2", beta2},
                               {"c0", r.value},
                               {"x_star", r.x_star},
                               {"x_max", r.x_max},
                               {"grid_points", r.grid_points}});
    }
    c0s_.emplace(key, r);
    return r;
}

std::size_t CoeffCache::memory_entries() const {
    std::lock_guard lock(mutex_);
    return tables_.size() + c0s_.size();
}

CoeffCache& CoeffCache::global() {
    static CoeffCache instance = [] {
        if (const char* dir = std::getenv("LRDSTABLE_CACHE_DIR"); dir && *dir) {
            return CoeffCache(std::filesystem::path(dir));
        }
        return CoeffCache();
    }();
    return instance;
}

double cached_c0(double alpha, double beta2) { return CoeffCache::global().c0(alpha, beta2).value; }

}  // namespace lrdstable
