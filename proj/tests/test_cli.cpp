#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrdstable/gof_test.hpp"
#include "lrdstable/lrd_gaussian.hpp"
#include "lrdstable/stable_core.hpp"

using namespace lrdstable;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    const std::string cmd = std::string(LRDSTABLE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int status = pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) out.push_back(line);
    return out;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "lrdstable_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("generate-gaussian matches the library") {
    const auto r = run("generate-gaussian --d 0.5 --n 5 --seed 9 --pair");
    REQUIRE(r.status == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 6);
    CHECK(ls[0] == "index,z1,z2");
    const auto p = simulate_lrd_pair(LrdModel(0.5), 5, 9);
    for (std::size_t i = 0; i < 5; ++i) {
        double z1 = 0, z2 = 0;
        int idx = -1;
        REQUIRE(std::sscanf(ls[i + 1].c_str(), "%d,%lf,%lf", &idx, &z1, &z2) == 3);
        CHECK(idx == static_cast<int>(i));
        CHECK(z1 == p.z1[i]);  // 17 significant digits round-trip exactly
        CHECK(z2 == p.z2[i]);
    }
    const auto single = run("generate-gaussian --d 0.5 --n 3 --seed 9");
    CHECK(lines(single.out)[0] == "index,z1");
}

TEST_CASE("generate-stable writes a file") {
    const auto path = scratch("stable.csv");
    REQUIRE(run("generate-stable --alpha 1.5 --beta2 0.8 --d 0.3 --n 20 --seed 4 --out " + path.string()).status == 0);
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto ls = lines(text);
    REQUIRE(ls.size() == 21);
    CHECK(ls[0] == "index,x");
    const auto p = simulate_lrd_pair(LrdModel(0.3), 20, 4);
    double x = 0;
    int idx = 0;
    REQUIRE(std::sscanf(ls[3].c_str(), "%d,%lf", &idx, &x) == 2);
    CHECK(x == cms_transform(p.z1[2], p.z2[2], 1.5, 0.8));
}

TEST_CASE("cdf, coeffs and c0") {
    const auto r = run("cdf --alpha 1 --beta2 0 --x -1,0,2.5");
    REQUIRE(r.status == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 4);
    CHECK(ls[0] == "x,F");
    CHECK(ls[2] == "0,0.5");
    const auto co = run("coeffs --alpha 0.5 --beta2 0.5 --xmin -1 --xmax 1 --points 5");
    REQUIRE(co.status == 0);
    const auto cl = lines(co.out);
    REQUIRE(cl.size() == 6);
    CHECK(cl[0] == "x,J10,J01,err10,err01");
    const auto c = run("c0 --alpha 1 --beta2 0");
    REQUIRE(c.status == 0);
    double c0 = 0, xs = 1;
    REQUIRE(std::sscanf(lines(c.out)[1].c_str(), "%lf,%lf", &c0, &xs) == 2);
    CHECK(c0 == doctest::Approx(0.3989422804).epsilon(1e-8));
}

TEST_CASE("ks and test on a generated sample") {
    const auto path = scratch("ks.csv");
    REQUIRE(run("generate-stable --alpha 0.5 --beta2 0.5 --d 0.8 --n 256 --seed 1 --out " + path.string()).status == 0);
    const auto k = run("ks --input " + path.string() + " --alpha 0.5 --beta2 0.5 --d 0.8");
    REQUIRE(k.status == 0);
    const auto kl = lines(k.out);
    REQUIRE(kl.size() == 2);
    CHECK(kl[0] == "K_n,d_n,c0,K_n_normalized");
    double kn, dn, c0, ks;
    REQUIRE(std::sscanf(kl[1].c_str(), "%lf,%lf,%lf,%lf", &kn, &dn, &c0, &ks) == 4);
    CHECK(ks == doctest::Approx(kn / (dn * c0)).epsilon(1e-15));
    const auto t = run("test --input " + path.string() + " --alpha 0.5 --beta2 0.5 --d 0.8 --level 0.1 --json");
    REQUIRE(t.status == 0);
    const auto j = nlohmann::json::parse(t.out);
    CHECK(j.at("kstar").get<double>() == doctest::Approx(ks).epsilon(1e-15));
    CHECK(j.at("level").get<double>() == 0.1);
    CHECK(j.at("p_value").get<double>() == doctest::Approx(1.0 - half_normal_cdf(ks)).epsilon(1e-12));
}

TEST_CASE("mc-table with a configuration file and worker override") {
    const auto cfg = scratch("table.ini");
    {
        std::ofstream out(cfg);
        out << "[mc-table]\nalpha = 1\nbeta2 = 0\nd-list = 0.5\nn-list = 64\nreps = 20\nseed = 5\n";
    }
    const auto a = run("mc-table --config " + cfg.string());
    REQUIRE(a.status == 0);
    const auto b = run("mc-table --alpha 1 --beta2 0 --d-list 0.5 --n-list 64 --reps 20 --seed 5");
    CHECK(a.out == b.out);
    const auto c = run("mc-table --alpha 1 --beta2 0 --d-list 0.5 --n-list 64 --reps 20 --seed 5 --workers 3");
    CHECK(c.out == b.out);
    setenv("LRDSTABLE_WORKERS", "2", 1);
    const auto d = run("mc-table --alpha 1 --beta2 0 --d-list 0.5 --n-list 64 --reps 20 --seed 5");
    unsetenv("LRDSTABLE_WORKERS");
    CHECK(d.out == b.out);
    CHECK(lines(b.out).size() == 2);
    const auto js = run("mc-table --alpha 1 --beta2 0 --d-list 0.5 --n-list 64 --reps 20 --seed 5 --json");
    const auto j = nlohmann::json::parse(js.out);
    CHECK(j.at("rows").size() == 1);
    CHECK(j.at("master_seed").get<int>() == 5);
    const auto empty = run("mc-table --alpha 1 --beta2 0 --d-list \"\" --n-list 64 --reps 20");
    CHECK(empty.status == 0);
}

TEST_CASE("argument and domain errors give nonzero status") {
    CHECK(run("").status != 0);
    CHECK(run("generate-gaussian --d 1.5 --n 10 --seed 1").status == 2);
    CHECK(run("generate-gaussian --d 0.5 --n 0 --seed 1").status == 2);
    CHECK(run("cdf --alpha 2.5 --beta2 0 --x 1").status == 2);
    CHECK(run("ks --input /nonexistent/file --alpha 1 --beta2 0 --d 0.5").status != 0);
    CHECK(run("mc-table --alpha 1 --beta2 0 --reps 1").status == 2);
}
