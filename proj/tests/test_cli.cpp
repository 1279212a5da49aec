#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const char* cli_path() { return BALLGAP_CLI_PATH; }

fs::path make_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ballgap_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_config(const fs::path& path, const json& j) {
    std::ofstream out(path);
    out << j.dump(2);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json weight_json(double gamma, double alpha, double beta, double delta0) {
    return {{"kind", "power"}, {"gamma", gamma}, {"alpha", alpha}, {"beta", beta},
            {"delta0", delta0}};
}

}  // namespace

TEST_CASE("weights-verify: exit codes track the verdict") {
    const auto dir = make_dir("wv");
    write_config(dir / "pass.json", {{"command", "weights-verify"},
                                     {"weight", weight_json(0.5, 0.4, 0.6, 0.5)},
                                     {"grid_size", 2000}});
    CHECK(run_cli("--config " + (dir / "pass.json").string() + " --seed 7 --out " +
                  (dir / "out1").string()) == 0);
    const json rep = json::parse(slurp(dir / "out1" / "report.json"));
    CHECK(rep.at("report").at("pass").get<bool>());
    CHECK(rep.at("seed").get<int>() == 7);

    write_config(dir / "fail.json", {{"command", "weights-verify"},
                                     {"weight", weight_json(0.5, 0.6, 0.7, 0.5)},
                                     {"grid_size", 2000}});
    CHECK(run_cli("--config " + (dir / "fail.json").string() + " --out " +
                  (dir / "out2").string()) == 1);
}

TEST_CASE("malformed configs exit with code 2") {
    const auto dir = make_dir("bad");
    write_config(dir / "nocmd.json", {{"weight", weight_json(0.5, 0.4, 0.6, 0.5)}});
    CHECK(run_cli("--config " + (dir / "nocmd.json").string() + " --out " + dir.string()) == 2);

    std::ofstream(dir / "garbage.json") << "{ not json";
    CHECK(run_cli("--config " + (dir / "garbage.json").string() + " --out " + dir.string()) ==
          2);

    CHECK(run_cli("--config " + (dir / "missing.json").string() + " --out " + dir.string()) ==
          2);

    // semantic error in a field: alpha >= beta
    write_config(dir / "badweight.json", {{"command", "weights-verify"},
                                          {"weight", weight_json(0.5, 0.7, 0.6, 0.5)}});
    CHECK(run_cli("--config " + (dir / "badweight.json").string() + " --out " + dir.string()) ==
          2);
}

TEST_CASE("series-check emits the membership table") {
    const auto dir = make_dir("sc");
    json terms = json::array();
    const json mu = weight_json(0.5, 0.4, 0.6, 0.5);
    for (int k = 0; k < 12; ++k) {
        const uint64_t deg = uint64_t(1) << k;
        const double gap = deg <= 1 ? 1.0 : 1.0 / static_cast<double>(deg);
        const double c = 1.0 / std::pow(gap * (2.0 - gap), 0.5);
        terms.push_back({{"degree", deg},
                         {"centers", json::array({json::array({1.0, 0.0, 0.0, 0.0})})},
                         {"coeffs", json::array({json::array({c, 0.0})})},
                         {"supnorm_hint", c}});
    }
    write_config(dir / "cfg.json",
                 {{"command", "series-check"},
                  {"weight", mu},
                  {"series", {{"cdim", 2}, {"terms", terms}}}});
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --out " + dir.string()) == 0);
    const json rep = json::parse(slurp(dir / "report.json"));
    CHECK(rep.at("report").at("in_hmu") == "yes");
    CHECK(rep.at("report").at("in_little") == "no");
    const std::string csv = slurp(dir / "a_k.csv");
    CHECK(csv.rfind("k,n_k,a_lower,a_upper\n", 0) == 0);
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 13);  // header + 12 terms
}

TEST_CASE("witness build + verify round trip through the family directory") {
    const auto dir = make_dir("wb");
    const json params = {{"n", 2}, {"A", 1.0}, {"p", 2}, {"M", 2}, {"V", 1},
                         {"mode", "micro"}, {"weight", weight_json(0.5, 0.4, 0.6, 0.5)}};
    write_config(dir / "build.json",
                 {{"command", "witness-build"}, {"params", params}, {"budget", 4000}});
    CHECK(run_cli("--config " + (dir / "build.json").string() + " --seed 42 --out " +
                  (dir / "out").string()) == 0);
    CHECK(fs::exists(dir / "out" / "family" / "params.json"));
    CHECK(fs::exists(dir / "out" / "family" / "manifest.json"));

    write_config(dir / "verify.json",
                 {{"command", "witness-verify"},
                  {"family_dir", (dir / "out" / "family").string()},
                  {"shells", json::array({json::array({1, 0}), json::array({2, 0})})},
                  {"samples_per_shell", 150}});
    CHECK(run_cli("--config " + (dir / "verify.json").string() + " --seed 42 --out " +
                  (dir / "vout").string()) == 0);
    const json rep = json::parse(slurp(dir / "vout" / "report.json"));
    CHECK(rep.at("report").at("C_emp").get<double>() > 0.0);
    CHECK(fs::exists(dir / "vout" / "shells.csv"));
    CHECK(fs::exists(dir / "vout" / "growth_g_1_0.csv"));
    CHECK(fs::exists(dir / "vout" / "growth_h_2_0.csv"));
}

TEST_CASE("--mode overrides the witness mode in the config") {
    const auto dir = make_dir("mode");
    // p = 2 fails the desk-mode constraints, so the build only runs when the
    // flag downgrades the family to micro
    const json params = {{"n", 2}, {"A", 1.0}, {"p", 2}, {"M", 2}, {"V", 0},
                         {"mode", "desk"}, {"weight", weight_json(0.5, 0.4, 0.6, 0.5)}};
    write_config(dir / "build.json",
                 {{"command", "witness-build"}, {"params", params}, {"budget", 2000}});
    CHECK(run_cli("--config " + (dir / "build.json").string() + " --out " +
                  (dir / "a").string()) == 2);
    CHECK(run_cli("--config " + (dir / "build.json").string() + " --mode micro --out " +
                  (dir / "b").string()) == 0);
}

TEST_CASE("compose-verdict distinguishes the two integrability regimes") {
    const auto dir = make_dir("cv");
    json table_pts = json::array();
    auto push_table = [&](double c) {
        json pts = json::array();
        pts.push_back(json::array({0.0, 1.0}));
        double gap = 0.5;
        while (gap > 1e-7) {
            pts.push_back(json::array({1.0 - gap, std::pow(gap, c)}));
            gap /= 1.15;
        }
        return pts;
    };
    auto mixed = [&](double c, double a, double b) {
        return json{{"p", 2.0},
                    {"q", 2.0},
                    {"phi", {{"kind", "table"}, {"points", push_table(c)}, {"alpha", a},
                             {"beta", b}, {"delta0", 0.5}}}};
    };
    const json sym = {{"u", {{"kind", "const"}, {"value", 1.0}}},
                      {"phi", {{"kind", "identity"}}}};

    write_config(dir / "finite.json", {{"command", "compose-verdict"},
                                       {"n", 2},
                                       {"symbol", sym},
                                       {"mu", weight_json(0.5, 0.4, 0.6, 0.5)},
                                       {"mixed", mixed(0.75, 0.7, 0.8)},
                                       {"mc_samples", 256},
                                       {"radial_grid", 10}});
    CHECK(run_cli("--config " + (dir / "finite.json").string() + " --out " +
                  (dir / "fo").string()) == 0);
    const json frep = json::parse(slurp(dir / "fo" / "report.json"));
    CHECK(frep.at("report").at("verdict") == "bounded AND compact");
    CHECK(fs::exists(dir / "fo" / "eps_ladder.csv"));
    CHECK(fs::exists(dir / "fo" / "t_ladder.csv"));

    write_config(dir / "div.json", {{"command", "compose-verdict"},
                                    {"n", 2},
                                    {"symbol", sym},
                                    {"mu", weight_json(0.5, 0.4, 0.6, 0.5)},
                                    {"mixed", mixed(0.25, 0.2, 0.3)},
                                    {"mc_samples", 256},
                                    {"radial_grid", 10}});
    CHECK(run_cli("--config " + (dir / "div.json").string() + " --out " +
                  (dir / "do").string()) == 1);
    const json drep = json::parse(slurp(dir / "do" / "report.json"));
    CHECK(drep.at("report").at("verdict") == "unbounded");

    // ladder tables: default eps ladder has 3 rows; an empty t ladder still
    // produces the header
    {
        const std::string eps_csv = slurp(dir / "fo" / "eps_ladder.csv");
        int rows = -1;  // discount the header
        for (char ch : eps_csv)
            if (ch == '\n') ++rows;
        CHECK(rows == 3);
    }
    json cfg = json::parse(slurp(dir / "finite.json"));
    cfg["t_ladder"] = json::array();
    write_config(dir / "nold.json", cfg);
    CHECK(run_cli("--config " + (dir / "nold.json").string() + " --out " +
                  (dir / "no").string()) == 0);
    CHECK(slurp(dir / "no" / "t_ladder.csv") == "t,tail_integral\n");
}

TEST_CASE("reports are byte-identical across thread counts") {
    const auto dir = make_dir("det");
    const json params = {{"n", 2}, {"A", 1.0}, {"p", 2}, {"M", 2}, {"V", 1},
                         {"mode", "micro"}, {"weight", weight_json(0.5, 0.4, 0.6, 0.5)}};
    write_config(dir / "verify.json", {{"command", "witness-verify"},
                                       {"params", params},
                                       {"budget", 3000},
                                       {"shells", json::array({json::array({1, 0})})},
                                       {"samples_per_shell", 120}});
    for (const char* threads : {"1", "4"}) {
        CHECK(run_cli("--config " + (dir / "verify.json").string() + " --seed 9 --threads " +
                      threads + " --out " + (dir / ("t" + std::string(threads))).string()) == 0);
    }
    CHECK(slurp(dir / "t1" / "report.json") == slurp(dir / "t4" / "report.json"));
    CHECK(slurp(dir / "t1" / "shells.csv") == slurp(dir / "t4" / "shells.csv"));
    CHECK(slurp(dir / "t1" / "growth_g_1_0.csv") == slurp(dir / "t4" / "growth_g_1_0.csv"));
}
