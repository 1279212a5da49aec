#include "ballgap/compose.hpp"
#include "ballgap/parallel.hpp"
#include "ballgap/polyseries.hpp"
#include "ballgap/serialize.hpp"
#include "ballgap/sphere.hpp"
#include "ballgap/weights.hpp"
#include "ballgap/witness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ballgap::io::json;

namespace {

// fixed "C"-locale formatting so reports are byte-stable
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_report(const fs::path& out_dir, const json& report) {
    write_text(out_dir / "report.json", report.dump(2) + "\n");
}

json base_report(const std::string& command, uint64_t seed, const json& resolved_config) {
    json r;
    r["command"] = command;
    r["seed"] = seed;
    r["config"] = resolved_config;
    return r;
}

std::string hmu_name(ballgap::HmuVerdict v) {
    switch (v) {
        case ballgap::HmuVerdict::Yes: return "yes";
        case ballgap::HmuVerdict::No: return "no";
        case ballgap::HmuVerdict::ReportedSup: return "reported-sup";
    }
    return "reported-sup";
}

int run_weights_verify(const json& cfg, uint64_t seed, const fs::path& out) {
    const auto w = ballgap::io::weight_from_json(cfg.at("weight"));
    const int grid = cfg.value("grid_size", 10000);
    const auto rep = ballgap::verify_normality(w, grid);

    json resolved;
    resolved["weight"] = ballgap::io::weight_to_json(w);
    resolved["grid_size"] = grid;
    json r = base_report("weights-verify", seed, resolved);
    r["report"] = {{"pass", rep.pass},
                   {"alpha_ratio_nonincreasing", rep.alpha_ratio_nonincreasing},
                   {"beta_ratio_nondecreasing", rep.beta_ratio_nondecreasing},
                   {"alpha_trend_to_zero", rep.alpha_trend_to_zero},
                   {"beta_trend_to_infinity", rep.beta_trend_to_infinity},
                   {"max_alpha_violation", rep.max_alpha_violation},
                   {"max_beta_violation", rep.max_beta_violation}};
    write_report(out, r);
    return rep.pass ? 0 : 1;
}

int run_series_check(const json& cfg, uint64_t seed, const fs::path& out) {
    const auto w = ballgap::io::weight_from_json(cfg.at("weight"));
    size_t cdim = 0;
    const auto f = ballgap::io::series_from_json(cfg.at("series"), &cdim);
    ballgap::MembershipOptions opt;
    opt.little_threshold = cfg.value("little_threshold", 0.1);
    opt.seed = seed;
    const auto had = ballgap::check_hadamard(f);
    const auto prof = ballgap::membership_profile(f, w, opt);

    std::string csv = "k,n_k,a_lower,a_upper\n";
    for (size_t k = 0; k < prof.rows.size(); ++k) {
        csv += std::to_string(k) + "," + std::to_string(prof.rows[k].degree) + "," +
               fmt(prof.rows[k].a_lower) + "," + fmt(prof.rows[k].a_upper) + "\n";
    }
    write_text(out / "a_k.csv", csv);

    json resolved;
    resolved["weight"] = ballgap::io::weight_to_json(w);
    resolved["series"] = ballgap::io::series_to_json(f, cdim);
    resolved["little_threshold"] = opt.little_threshold;
    json r = base_report("series-check", seed, resolved);
    r["report"] = {{"hadamard", {{"is_gap", had.is_gap}, {"c", had.c}}},
                   {"in_hmu", hmu_name(prof.in_hmu)},
                   {"in_little", prof.in_little == ballgap::LittleVerdict::Yes ? "yes" : "no"},
                   {"sup_upper", prof.sup_upper},
                   {"little_threshold", prof.little_threshold},
                   {"terms", prof.rows.size()}};
    write_report(out, r);
    return prof.in_hmu == ballgap::HmuVerdict::Yes ? 0 : 1;
}

ballgap::WitnessParams resolve_witness_params(const json& jp, uint64_t seed,
                                              const std::string& mode_override,
                                              json* resolved_out) {
    ballgap::WitnessParams p;
    p.n = jp.at("n").get<size_t>();
    p.weight = ballgap::io::weight_from_json(jp.at("weight"));
    std::string mode = jp.value("mode", "desk");
    if (!mode_override.empty()) mode = mode_override;
    if (mode == "strict")
        p.mode = ballgap::WitnessMode::Strict;
    else if (mode == "micro")
        p.mode = ballgap::WitnessMode::Micro;
    else
        p.mode = ballgap::WitnessMode::Desk;
    p.V = jp.value("V", 0);

    p.A = jp.contains("A") ? jp.at("A").get<double>()
                           : ballgap::select_A(p.n, jp.value("A_grid", 0.01));
    if (jp.contains("M")) {
        p.M = jp.at("M").get<int>();
    } else {
        std::vector<double> probes = jp.value("M_probes", std::vector<double>{0.25, 0.5});
        p.M = ballgap::estimate_M(p.n, p.A, probes, seed);
    }
    p.p = jp.contains("p") ? jp.at("p").get<int>() : ballgap::select_p(p.weight, p.M);

    if (resolved_out) {
        *resolved_out = ballgap::io::witness_params_to_json(p);
        // the constraint constants the chosen mode actually enforces
        json constants;
        if (p.mode == ballgap::WitnessMode::Strict) {
            constants["zonal_sum_cap"] = 1.0 / 27.0;
            constants["coefficient_caps"] = 1.0 / 200.0;
        } else if (p.mode == ballgap::WitnessMode::Desk) {
            constants["coefficient_caps"] = 1.0 / 20.0;
            constants["A_unchecked"] = true;
        } else {
            constants["unchecked"] = true;
        }
        (*resolved_out)["mode_constants"] = std::move(constants);
    }
    return p;
}

json growth_report_json(const ballgap::GrowthReport& rep) {
    json rows = json::array();
    for (const auto& row : rep.rows) {
        json jr;
        jr["kind"] = row.kind == ballgap::LadderKind::G ? "g" : "h";
        jr["j"] = row.j;
        jr["v"] = row.v;
        jr["e"] = row.e;
        jr["shell_lo"] = row.shell_lo;
        jr["shell_hi"] = row.shell_hi;
        jr["verified"] = row.verified;
        if (!row.verified) jr["flag"] = row.flag;
        jr["samples"] = row.samples;
        if (row.verified) {
            jr["min_mu_cert"] = row.min_mu_cert;
            jr["argmin_r"] = row.argmin_r;
            jr["argmin_eta"] = row.argmin_eta;
            jr["i1_below_chain"] = row.i1_below_chain;
            jr["direct_available"] = row.direct_available;
            if (row.direct_available) jr["min_mu_direct"] = row.min_mu_direct;
            if (row.kind == ballgap::LadderKind::G) {
                jr["strict_target"] = row.strict_target;
                jr["meets_strict_target"] = row.meets_strict_target;
            }
        }
        rows.push_back(std::move(jr));
    }
    json j;
    j["rows"] = std::move(rows);
    j["C_cert"] = rep.C_cert;
    j["C_emp"] = rep.C_emp;
    j["any_direct"] = rep.any_direct;
    j["all_requested_verified"] = rep.all_requested_verified;
    return j;
}

void write_growth_csvs(const ballgap::GrowthReport& rep, const fs::path& out) {
    std::string csv =
        "kind,j,v,e,samples,min_mu_cert,min_mu_direct,argmin_r,verified,flag,meets_strict_"
        "target\n";
    for (const auto& row : rep.rows) {
        csv += std::string(row.kind == ballgap::LadderKind::G ? "g" : "h") + "," +
               std::to_string(row.j) + "," + std::to_string(row.v) + "," +
               std::to_string(row.e) + "," + std::to_string(row.samples) + "," +
               (row.verified ? fmt(row.min_mu_cert) : "") + "," +
               (row.verified && row.direct_available ? fmt(row.min_mu_direct) : "") + "," +
               (row.verified ? fmt(row.argmin_r) : "") + "," +
               (row.verified ? "1" : "0") + "," + row.flag + "," +
               (row.meets_strict_target ? "1" : "0") + "\n";
    }
    write_text(out / "shells.csv", csv);

    for (const auto& row : rep.rows) {
        if (!row.verified) continue;
        auto trace = row.trace;
        std::sort(trace.begin(), trace.end(),
                  [](const auto& a, const auto& b) { return a.r < b.r; });
        std::string curve = "r,mu_sigma_cert,mu_sigma_direct\n";
        for (const auto& s : trace) {
            curve += fmt(s.r) + "," + fmt(s.mu_cert) + "," +
                     (row.direct_available ? fmt(s.mu_direct) : "") + "\n";
        }
        const std::string name = std::string("growth_") +
                                 (row.kind == ballgap::LadderKind::G ? "g" : "h") + "_" +
                                 std::to_string(row.j) + "_" + std::to_string(row.v) + ".csv";
        write_text(out / name, curve);
    }
}

std::vector<std::pair<int, int>> resolve_shells(const json& cfg,
                                                const ballgap::WitnessFamily& fam) {
    std::vector<std::pair<int, int>> shells;
    if (!cfg.contains("shells") || cfg.at("shells").is_string()) {
        // default: every (j,v) with at least one constructed ladder level
        for (int j = 1; j <= fam.params.M; ++j)
            for (int v = 0; v <= fam.params.V; ++v)
                if (fam.level(ballgap::LadderKind::G, j, v).constructed ||
                    fam.level(ballgap::LadderKind::H, j, v).constructed)
                    shells.emplace_back(j, v);
    } else {
        for (const auto& s : cfg.at("shells"))
            shells.emplace_back(s.at(0).get<int>(), s.at(1).get<int>());
    }
    return shells;
}

int run_witness_build(const json& cfg, uint64_t seed, const fs::path& out,
                      const std::string& mode_override) {
    json resolved_params;
    const auto params =
        resolve_witness_params(cfg.at("params"), seed, mode_override, &resolved_params);
    const size_t budget = cfg.value("budget", 4000);
    const auto fam = ballgap::build_witness_family(params, budget, seed);
    ballgap::io::save_witness_family(fam, out / "family");

    size_t g_built = 0, h_built = 0;
    json levels = json::array();
    for (const auto* vec : {&fam.g_levels, &fam.h_levels}) {
        for (const auto& L : *vec) {
            if (L.constructed) (L.kind == ballgap::LadderKind::G ? g_built : h_built)++;
            json jl;
            jl["kind"] = L.kind == ballgap::LadderKind::G ? "g" : "h";
            jl["j"] = L.j;
            jl["v"] = L.v;
            jl["constructed"] = L.constructed;
            jl["points"] = L.constructed ? L.gamma.size() : 0;
            jl["classes"] = L.classes.size();
            jl["degenerate"] = L.degenerate;
            jl["ownership_complete"] = L.ownership_complete;
            jl["le2"] = L.le2;
            if (!L.constructed) jl["skip_reason"] = L.skip_reason;
            levels.push_back(std::move(jl));
        }
    }

    json resolved;
    resolved["params"] = resolved_params;
    resolved["budget"] = budget;
    json r = base_report("witness-build", seed, resolved);
    r["report"] = {{"levels", levels},
                   {"g_constructed", g_built},
                   {"h_constructed", h_built},
                   {"family_dir", "family"}};
    write_report(out, r);
    return (g_built > 0 && h_built > 0) ? 0 : 1;
}

int run_witness_verify(const json& cfg, uint64_t seed, const fs::path& out,
                       const std::string& mode_override) {
    ballgap::WitnessFamily fam;
    json resolved;
    if (cfg.contains("family_dir")) {
        fam = ballgap::io::load_witness_family(cfg.at("family_dir").get<std::string>());
        resolved["family_dir"] = cfg.at("family_dir");
        resolved["params"] = ballgap::io::witness_params_to_json(fam.params);
    } else {
        json resolved_params;
        const auto params =
            resolve_witness_params(cfg.at("params"), seed, mode_override, &resolved_params);
        const size_t budget = cfg.value("budget", 4000);
        fam = ballgap::build_witness_family(params, budget, seed);
        resolved["params"] = resolved_params;
        resolved["budget"] = budget;
    }
    const auto shells = resolve_shells(cfg, fam);
    const size_t samples = cfg.value("samples_per_shell", 1000);
    resolved["samples_per_shell"] = samples;

    const auto rep = ballgap::verify_growth(fam, shells, samples, seed);
    write_growth_csvs(rep, out);

    json r = base_report("witness-verify", seed, resolved);
    r["report"] = growth_report_json(rep);

    bool strict_ok = true;
    if (fam.params.mode == ballgap::WitnessMode::Strict) {
        for (const auto& row : rep.rows)
            if (row.verified && row.kind == ballgap::LadderKind::G && !row.meets_strict_target)
                strict_ok = false;
    }
    const double c_best = rep.any_direct ? rep.C_emp : rep.C_cert;
    const bool pass = c_best > 0.0 && strict_ok;
    r["report"]["pass"] = pass;
    write_report(out, r);
    return pass ? 0 : 1;
}

int run_compose_verdict(const json& cfg, uint64_t seed, const fs::path& out) {
    const size_t cdim = cfg.value("n", 2);
    ballgap::SymbolPair sym{
        ballgap::io::evaluable_from_json(cfg.at("symbol").at("u"), cdim),
        ballgap::io::phi_from_json(cfg.at("symbol").at("phi"), cdim)};
    const auto mu = ballgap::io::weight_from_json(cfg.at("mu"));
    ballgap::MixedNormParams mp;
    mp.p = cfg.at("mixed").at("p").get<double>();
    mp.q = cfg.at("mixed").at("q").get<double>();
    mp.phi = ballgap::io::weight_from_json(cfg.at("mixed").at("phi"));

    ballgap::VerdictOptions opt;
    opt.mc_samples = cfg.value("mc_samples", 4096);
    opt.radial_grid = cfg.value("radial_grid", 16);
    opt.seed = seed;
    if (cfg.contains("eps_ladder"))
        opt.integral.eps_ladder = cfg.at("eps_ladder").get<std::vector<double>>();
    if (cfg.contains("t_ladder"))
        opt.t_ladder = cfg.at("t_ladder").get<std::vector<double>>();

    const auto verdict = ballgap::operator_verdict(sym, mu, mp, opt);

    std::string eps_csv = "eps_edge,integral\n";
    for (const auto& [eps, v] : verdict.integral.diag.eps_ladder)
        eps_csv += fmt(eps) + "," + fmt(v) + "\n";
    write_text(out / "eps_ladder.csv", eps_csv);
    std::string t_csv = "t,tail_integral\n";
    for (const auto& [t, v] : verdict.t_ladder_values) t_csv += fmt(t) + "," + fmt(v) + "\n";
    write_text(out / "t_ladder.csv", t_csv);

    json resolved;
    resolved["n"] = cdim;
    resolved["symbol"] = cfg.at("symbol");
    resolved["mu"] = ballgap::io::weight_to_json(mu);
    resolved["mixed"] = {{"p", mp.p},
                         {"q", mp.q},
                         {"phi", ballgap::io::weight_to_json(mp.phi)}};
    resolved["mc_samples"] = opt.mc_samples;
    resolved["radial_grid"] = opt.radial_grid;
    resolved["eps_ladder"] = opt.integral.eps_ladder;
    resolved["t_ladder"] = opt.t_ladder;

    json r = base_report("compose-verdict", seed, resolved);
    const char* cls = verdict.cls == ballgap::OperatorClass::BoundedCompact
                          ? "bounded AND compact"
                          : verdict.cls == ballgap::OperatorClass::Unbounded ? "unbounded"
                                                                             : "undetermined";
    json ladder = json::array();
    for (const auto& [eps, v] : verdict.integral.diag.eps_ladder)
        ladder.push_back({{"eps_edge", eps}, {"integral", v}});
    json tladder = json::array();
    for (const auto& [t, v] : verdict.t_ladder_values)
        tladder.push_back({{"t", t}, {"tail_integral", v}});
    r["report"] = {{"verdict", cls},
                   {"value", verdict.integral.value},
                   {"eps_ladder", ladder},
                   {"t_ladder", tladder},
                   {"grid_value_coarse", verdict.integral.diag.value_coarse},
                   {"grid_value_fine", verdict.integral.diag.value_fine},
                   {"tail_bound", verdict.integral.diag.tail_bound},
                   {"tail_certified", verdict.integral.diag.tail_certified},
                   {"max_inner_stderr", verdict.integral.diag.max_inner_stderr},
                   {"cross_check_consistent", verdict.cross_check_consistent}};
    write_report(out, r);
    return verdict.cls == ballgap::OperatorClass::BoundedCompact ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted-type spaces on the unit ball: verification pipelines"};
    std::string config_path, out_dir = ".", mode_override;
    long long seed_flag = -1;
    int threads = 0;
    app.add_option("--config", config_path, "pipeline configuration (JSON)")->required();
    app.add_option("--seed", seed_flag, "seed override (recorded in all outputs)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (affects speed only, never results)");
    app.add_option("--mode", mode_override, "witness mode override: strict|desk|micro");
    CLI11_PARSE(app, argc, argv);

    try {
        if (threads > 0) ballgap::set_max_threads(threads);
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "error: cannot open config '" << config_path << "'\n";
            return 2;
        }
        json cfg;
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            std::cerr << "error: config parse failure: " << e.what() << "\n";
            return 2;
        }
        const uint64_t seed =
            seed_flag >= 0 ? static_cast<uint64_t>(seed_flag) : cfg.value("seed", 1);
        fs::create_directories(out_dir);
        const std::string command = cfg.at("command").get<std::string>();
        if (command == "weights-verify") return run_weights_verify(cfg, seed, out_dir);
        if (command == "series-check") return run_series_check(cfg, seed, out_dir);
        if (command == "witness-build")
            return run_witness_build(cfg, seed, out_dir, mode_override);
        if (command == "witness-verify")
            return run_witness_verify(cfg, seed, out_dir, mode_override);
        if (command == "compose-verdict") return run_compose_verdict(cfg, seed, out_dir);
        std::cerr << "error: unknown command '" << command << "'\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: config field: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: domain: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
