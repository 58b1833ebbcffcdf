#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = RGBM_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rgbm_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("bad step count is a usage error") {
    CHECK(run("simulate --steps 0 --out " +
              (fresh_dir("bad_steps") / "o").string()) == 2);
}

TEST_CASE("unknown subcommand fails") {
    CHECK(run("frobnicate") != 0);
}

TEST_CASE("nneg with r equal to q is a pricing error") {
    const auto dir = fresh_dir("rq");
    CHECK(run("price --kind nneg --r 0.03 --q 0.03 --sigma 0.3 --b 0.5 --s 1.0 "
              "--strike 0.9 --maturity 20 --methods rgbm --out " +
              (dir / "o").string()) == 3);
}

TEST_CASE("simulate is byte-identical across runs") {
    const auto d1 = fresh_dir("sim1"), d2 = fresh_dir("sim2");
    const std::string common = "simulate --seed 7 --steps 2000 --horizon 2 --out ";
    REQUIRE(run(common + d1.string()) == 0);
    REQUIRE(run(common + d2.string()) == 0);
    CHECK(slurp(d1 / "path_7.csv") == slurp(d2 / "path_7.csv"));
    CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));
}

TEST_CASE("simulate figure 1 emits the three-column figure data") {
    const auto dir = fresh_dir("fig1");
    REQUIRE(run("simulate --figure 1 --steps 5000 --out " + dir.string()) == 0);
    const std::string body = slurp(dir / "figure1.csv");
    CHECK(body.rfind("time,s,l,position", 0) == 0);
    const auto summary = slurp_json(dir / "summary.json");
    CHECK(summary.at("hit_fraction").get<double>() >= 0.0);
}

TEST_CASE("price figure 2 at the boundary flags the violation") {
    const auto dir = fresh_dir("price2");
    REQUIRE(run("price --figure 2 --kind call --s 1.0 --methods rgbm --methods bs "
                "--out " + dir.string()) == 0);
    const auto result = slurp_json(dir / "price.json");
    const auto& quotes = result.at("quotes");
    REQUIRE(quotes.size() == 2);
    const auto& rgbm_q = quotes[0];
    CHECK(rgbm_q.at("method") == "rgbm_formula");
    CHECK(rgbm_q.at("value").get<double>() == Catch::Approx(1.36803840845788).margin(1e-9));
    CHECK(rgbm_q.at("bound_status").at("violated").get<bool>());
    CHECK_FALSE(quotes[1].at("bound_status").at("violated").get<bool>());
}

TEST_CASE("price figure 4 nneg reports the undervaluation ratios") {
    const auto dir = fresh_dir("price4");
    REQUIRE(run("price --figure 4 --kind nneg --maturity 20 --methods rgbm "
                "--methods black76 --out " + dir.string()) == 0);
    const auto result = slurp_json(dir / "price.json");
    CHECK(result.at("rgbm_over_bound").get<double>() == Catch::Approx(0.457).margin(0.002));
    CHECK(result.at("rgbm_over_black76").get<double>() == Catch::Approx(0.288).margin(0.002));
}

TEST_CASE("figure 2 data has the documented shape") {
    const auto dir = fresh_dir("figdata2");
    REQUIRE(run("figure 2 --out " + dir.string()) == 0);
    std::ifstream in(dir / "figure2.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "s,rgbm,bs,bound");
    double s, rgbm_v, bs_v, bound;
    char comma;
    int rows = 0;
    bool first_violates = false;
    double first_gap = 0.0, last_gap = 0.0, last_rel = 0.0;
    while (in >> s >> comma >> rgbm_v >> comma >> bs_v >> comma >> bound) {
        if (rows == 0) {
            first_violates = rgbm_v > bound;
            first_gap = std::fabs(rgbm_v - bs_v);
        }
        last_gap = std::fabs(rgbm_v - bs_v);
        last_rel = last_gap / rgbm_v;
        ++rows;
    }
    CHECK(rows == 500);
    CHECK(first_violates);          // inflated price at s = b
    CHECK(last_gap < first_gap / 5.0);  // approaches Black-Scholes along the grid
    CHECK(last_rel < 0.05);
}

TEST_CASE("figure 4 data crosses its bound and flattens") {
    const auto dir = fresh_dir("figdata4");
    REQUIRE(run("figure 4 --out " + dir.string()) == 0);
    std::ifstream in(dir / "figure4.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "T,rgbm,black76,bound,asymptote");
    double maturity, rgbm_v, b76, bound, asym;
    char comma;
    int rows = 0;
    bool below_somewhere = false;
    double final_rgbm = 0.0, final_asym = 0.0;
    while (in >> maturity >> comma >> rgbm_v >> comma >> b76 >> comma >> bound >>
           comma >> asym) {
        if (bound > 0.0 && rgbm_v < bound) below_somewhere = true;
        final_rgbm = rgbm_v;
        final_asym = asym;
        ++rows;
    }
    CHECK(rows == 400);
    CHECK(below_somewhere);
    CHECK(std::fabs(final_rgbm - final_asym) < 0.02);
}

TEST_CASE("figure runs are byte-identical") {
    const auto d1 = fresh_dir("figrep1"), d2 = fresh_dir("figrep2");
    REQUIRE(run("figure 3 --out " + d1.string()) == 0);
    REQUIRE(run("figure 3 --out " + d2.string()) == 0);
    CHECK(slurp(d1 / "figure3.csv") == slurp(d2 / "figure3.csv"));
}

TEST_CASE("sweep prop35 reports the crossing maturity") {
    const auto dir = fresh_dir("sweep35");
    REQUIRE(run("sweep --target prop35 --out " + dir.string()) == 0);
    const auto summary = slurp_json(dir / "sweep_prop35.json");
    REQUIRE(summary.contains("crossing_maturity"));
    const double crossing = summary.at("crossing_maturity").get<double>();
    CHECK(crossing > 10.0);
    CHECK(crossing < 11.0);
    CHECK(fs::exists(dir / "sweep_prop35.csv"));
}

TEST_CASE("arb reports the increasing-profit verdict") {
    const auto dir = fresh_dir("arb");
    REQUIRE(run("arb --figure 1 --n-seeds 20 --steps 10000 --horizon 10 --out " +
                dir.string()) == 0);
    const auto verdict = slurp_json(dir / "verdict.json");
    CHECK(verdict.at("all_nondecreasing").get<bool>());
    CHECK(verdict.at("value_equals_reflection_term").get<bool>());
    CHECK(verdict.at("positive_fraction").get<double>() > 0.0);
    CHECK(fs::exists(dir / "trajectory_1.csv"));
}

TEST_CASE("config file values apply and flags override them") {
    const auto dir = fresh_dir("cfg");
    const fs::path cfg_path = dir / "cfg.json";
    {
        std::ofstream out(cfg_path);
        out << R"({"sigma": 0.3, "seed": 99, "steps": 777})" << "\n";
    }
    REQUIRE(run("simulate --config " + cfg_path.string() + " --sigma 0.2 --out " +
                (dir / "o").string()) == 0);
    const auto resolved = slurp_json(dir / "o" / "config_resolved.json");
    CHECK(resolved.at("sigma").get<double>() == 0.2);   // flag wins
    CHECK(resolved.at("seed").get<std::uint64_t>() == 99);  // file value kept
    CHECK(resolved.at("steps").get<std::int64_t>() == 777);
    CHECK(fs::exists(dir / "o" / "path_99.csv"));
}
