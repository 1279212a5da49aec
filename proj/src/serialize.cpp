#include "ballgap/serialize.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ballgap::io {

namespace {

json complex_to_json(std::complex<double> c) { return json::array({c.real(), c.imag()}); }

std::complex<double> complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

void write_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

void check_unit_row(const double* row, size_t cdim, const char* what) {
    double norm2 = 0.0;
    for (size_t t = 0; t < 2 * cdim; ++t) norm2 += row[t] * row[t];
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
        throw std::invalid_argument(std::string(what) + ": point is not unit-norm");
}

json read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    json j;
    in >> j;
    return j;
}

}  // namespace

json weight_to_json(const NormalWeight& w) {
    json j;
    j["alpha"] = w.alpha();
    j["beta"] = w.beta();
    j["delta0"] = w.delta0();
    if (w.kind() == WeightKind::Power) {
        j["kind"] = "power";
        j["gamma"] = w.gamma();
    } else {
        j["kind"] = "table";
        json pts = json::array();
        for (const auto& [r, mu] : w.table()) pts.push_back(json::array({r, mu}));
        j["points"] = std::move(pts);
    }
    return j;
}

NormalWeight weight_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const double alpha = j.at("alpha").get<double>();
    const double beta = j.at("beta").get<double>();
    const double delta0 = j.at("delta0").get<double>();
    if (kind == "power")
        return NormalWeight::power(j.at("gamma").get<double>(), alpha, beta, delta0);
    if (kind == "table") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : j.at("points"))
            pts.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        return NormalWeight::tabulated(std::move(pts), alpha, beta, delta0);
    }
    throw std::invalid_argument("weight config: unknown kind '" + kind + "'");
}

json separated_set_to_json(const SeparatedSet& s) {
    json j;
    j["dim"] = s.cdim();
    j["separation"] = s.separation();
    j["seed"] = s.seed();
    j["maximal"] = s.maximal();
    j["degenerate"] = s.degenerate();
    json rows = json::array();
    for (size_t i = 0; i < s.size(); ++i) {
        json row = json::array();
        for (size_t t = 0; t < 2 * s.cdim(); ++t) row.push_back(s.point(i)[t]);
        rows.push_back(std::move(row));
    }
    j["points"] = std::move(rows);
    return j;
}

SeparatedSet separated_set_from_json(const json& j) {
    SeparatedSet s(j.at("dim").get<size_t>(), j.at("separation").get<double>(),
                   j.at("seed").get<uint64_t>());
    s.set_maximal(j.at("maximal").get<bool>());
    s.set_degenerate(j.at("degenerate").get<bool>());
    std::vector<double> pt;
    for (const auto& row : j.at("points")) {
        pt.clear();
        for (const auto& v : row) pt.push_back(v.get<double>());
        if (pt.size() != 2 * s.cdim())
            throw std::invalid_argument("separated set: bad row length");
        check_unit_row(pt.data(), s.cdim(), "separated set");
        s.append(pt.data());
    }
    return s;
}

void save_separated_set(const SeparatedSet& s, const std::filesystem::path& path) {
    write_file(path, separated_set_to_json(s));
}

SeparatedSet load_separated_set(const std::filesystem::path& path) {
    return separated_set_from_json(read_file(path));
}

json series_to_json(const GapSeries& f, size_t cdim) {
    json j;
    j["cdim"] = cdim;
    if (f.gap_ratio) j["gap_ratio"] = *f.gap_ratio;
    json terms = json::array();
    for (const auto& t : f.terms) {
        json jt;
        jt["degree"] = t.degree;
        json centers = json::array();
        for (size_t i = 0; i < t.poly.size(); ++i) {
            json row = json::array();
            for (size_t c = 0; c < 2 * cdim; ++c) row.push_back(t.poly.centers[i * 2 * cdim + c]);
            centers.push_back(std::move(row));
        }
        jt["centers"] = std::move(centers);
        if (!t.poly.coeffs.empty()) {
            json coeffs = json::array();
            for (const auto& c : t.poly.coeffs) coeffs.push_back(complex_to_json(c));
            jt["coeffs"] = std::move(coeffs);
        }
        if (t.supnorm_hint) jt["supnorm_hint"] = *t.supnorm_hint;
        terms.push_back(std::move(jt));
    }
    j["terms"] = std::move(terms);
    return j;
}

GapSeries series_from_json(const json& j, size_t* cdim_out) {
    const size_t cdim = j.at("cdim").get<size_t>();
    if (cdim_out) *cdim_out = cdim;
    GapSeries f;
    if (j.contains("gap_ratio")) f.gap_ratio = j.at("gap_ratio").get<double>();
    for (const auto& jt : j.at("terms")) {
        GapTerm t;
        t.degree = jt.at("degree").get<uint64_t>();
        t.poly.degree = t.degree;
        t.poly.cdim = cdim;
        for (const auto& row : jt.at("centers"))
            for (const auto& v : row) t.poly.centers.push_back(v.get<double>());
        if (t.poly.centers.size() % (2 * cdim) != 0)
            throw std::invalid_argument("series config: bad center row length");
        for (size_t i = 0; i < t.poly.centers.size() / (2 * cdim); ++i)
            check_unit_row(t.poly.centers.data() + i * 2 * cdim, cdim, "series center");
        if (jt.contains("coeffs"))
            for (const auto& c : jt.at("coeffs")) t.poly.coeffs.push_back(complex_from_json(c));
        if (!t.poly.coeffs.empty() && t.poly.coeffs.size() != t.poly.size())
            throw std::invalid_argument("series config: coeff/center count mismatch");
        if (jt.contains("supnorm_hint")) t.supnorm_hint = jt.at("supnorm_hint").get<double>();
        f.terms.push_back(std::move(t));
    }
    for (size_t i = 0; i + 1 < f.terms.size(); ++i) {
        if (f.terms[i + 1].degree <= f.terms[i].degree)
            throw std::invalid_argument("series config: degrees must strictly increase");
        if (f.gap_ratio) {
            const double ratio = static_cast<double>(f.terms[i + 1].degree) /
                                 static_cast<double>(f.terms[i].degree);
            if (ratio < *f.gap_ratio * (1.0 - 1e-12))
                throw std::invalid_argument(
                    "series config: stored degrees violate the gap_ratio certificate");
        }
    }
    return f;
}

Evaluable evaluable_from_json(const json& j, size_t cdim) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") return Evaluable::constant(complex_from_json(j.at("value")), cdim);
    if (kind == "coord") return Evaluable::coordinate(j.at("index").get<size_t>(), cdim);
    if (kind == "poly") {
        std::vector<Monomial> terms;
        for (const auto& jt : j.at("terms")) {
            Monomial m;
            m.coeff = complex_from_json(jt.at("coeff"));
            for (const auto& e : jt.at("exps")) m.exps.push_back(e.get<int>());
            terms.push_back(std::move(m));
        }
        return Evaluable::polynomial(std::move(terms), cdim);
    }
    if (kind == "zonal") {
        ZonalPolynomial P;
        P.cdim = cdim;
        P.degree = j.at("degree").get<uint64_t>();
        for (const auto& row : j.at("centers"))
            for (const auto& v : row) P.centers.push_back(v.get<double>());
        if (P.centers.size() % (2 * cdim) != 0)
            throw std::invalid_argument("zonal config: bad center row length");
        for (size_t i = 0; i < P.centers.size() / (2 * cdim); ++i)
            check_unit_row(P.centers.data() + i * 2 * cdim, cdim, "zonal center");
        if (j.contains("coeffs"))
            for (const auto& c : j.at("coeffs")) P.coeffs.push_back(complex_from_json(c));
        return Evaluable::zonal(std::move(P));
    }
    throw std::invalid_argument("symbol config: unknown evaluable kind '" + kind + "'");
}

PhiMap phi_from_json(const json& j, size_t cdim) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "identity") return PhiMap::scale(1.0, cdim);
    if (kind == "scale") return PhiMap::scale(j.at("s").get<double>(), cdim);
    if (kind == "linear") {
        std::vector<std::complex<double>> m;
        for (const auto& c : j.at("matrix")) m.push_back(complex_from_json(c));
        return PhiMap::linear(std::move(m), cdim);
    }
    if (kind == "poly") {
        std::vector<std::vector<Monomial>> coords;
        for (const auto& jc : j.at("coords")) {
            std::vector<Monomial> terms;
            for (const auto& jt : jc) {
                Monomial m;
                m.coeff = complex_from_json(jt.at("coeff"));
                for (const auto& e : jt.at("exps")) m.exps.push_back(e.get<int>());
                terms.push_back(std::move(m));
            }
            coords.push_back(std::move(terms));
        }
        return PhiMap::coord_poly(std::move(coords), cdim);
    }
    throw std::invalid_argument("symbol config: unknown phi kind '" + kind + "'");
}

namespace {

std::string mode_name(WitnessMode m) {
    switch (m) {
        case WitnessMode::Strict: return "strict";
        case WitnessMode::Desk: return "desk";
        case WitnessMode::Micro: return "micro";
    }
    return "desk";
}

WitnessMode mode_from_name(const std::string& s) {
    if (s == "strict") return WitnessMode::Strict;
    if (s == "desk") return WitnessMode::Desk;
    if (s == "micro") return WitnessMode::Micro;
    throw std::invalid_argument("unknown witness mode '" + s + "'");
}

}  // namespace

json witness_params_to_json(const WitnessParams& p) {
    json j;
    j["n"] = p.n;
    j["A"] = p.A;
    j["p"] = p.p;
    j["M"] = p.M;
    j["V"] = p.V;
    j["mode"] = mode_name(p.mode);
    j["weight"] = weight_to_json(p.weight);
    return j;
}

WitnessParams witness_params_from_json(const json& j) {
    WitnessParams p;
    p.n = j.at("n").get<size_t>();
    p.A = j.at("A").get<double>();
    p.p = j.at("p").get<int>();
    p.M = j.at("M").get<int>();
    p.V = j.at("V").get<int>();
    p.mode = mode_from_name(j.at("mode").get<std::string>());
    p.weight = weight_from_json(j.at("weight"));
    return p;
}

namespace {

std::string level_filename(const WitnessLevel& L) {
    return std::string("level_") + (L.kind == LadderKind::G ? "g" : "h") + "_" +
           std::to_string(L.j) + "_" + std::to_string(L.v) + ".json";
}

json level_summary(const WitnessLevel& L) {
    json j;
    j["kind"] = L.kind == LadderKind::G ? "g" : "h";
    j["j"] = L.j;
    j["v"] = L.v;
    j["e"] = L.e;
    j["degree"] = static_cast<double>(L.degree.hi);
    j["degree_exact"] = L.degree.exact;
    if (L.degree.exact) j["degree_int"] = L.degree.exact_value;
    j["delta"] = L.delta;
    j["delta_eff"] = L.delta_eff;
    j["degenerate"] = L.degenerate;
    j["constructed"] = L.constructed;
    if (!L.constructed) j["skip_reason"] = L.skip_reason;
    j["points"] = L.constructed ? L.gamma.size() : 0;
    j["classes"] = L.classes.size();
    j["ownership_complete"] = L.ownership_complete;
    j["lemma_bound"] = L.lemma_bound;
    j["sampled_max"] = L.sampled_max;
    j["le2"] = L.le2;
    return j;
}

}  // namespace

void save_witness_family(const WitnessFamily& fam, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json params = witness_params_to_json(fam.params);
    params["seed"] = fam.seed;
    params["budget"] = fam.budget;
    write_file(dir / "params.json", params);

    json manifest;
    manifest["levels"] = json::array();
    for (const auto* vec : {&fam.g_levels, &fam.h_levels}) {
        for (const auto& L : *vec) {
            manifest["levels"].push_back(level_summary(L));
            if (!L.constructed) continue;
            json lj;
            lj["separation"] = L.gamma.separation();
            lj["delta_eff"] = L.delta_eff;
            lj["set"] = separated_set_to_json(L.gamma);
            lj["class_of"] = L.class_of;
            write_file(dir / level_filename(L), lj);
        }
    }
    write_file(dir / "manifest.json", manifest);
}

WitnessFamily load_witness_family(const std::filesystem::path& dir) {
    const json params = read_file(dir / "params.json");
    WitnessParams p = witness_params_from_json(params);
    WitnessFamily fam;
    fam.params = p;
    fam.seed = params.at("seed").get<uint64_t>();
    fam.budget = params.at("budget").get<size_t>();
    const size_t n_levels = static_cast<size_t>(p.M) * (p.V + 1);
    fam.g_levels.resize(n_levels);
    fam.h_levels.resize(n_levels);

    const json manifest = read_file(dir / "manifest.json");
    for (const auto& js : manifest.at("levels")) {
        const LadderKind kind =
            js.at("kind").get<std::string>() == "g" ? LadderKind::G : LadderKind::H;
        const int j = js.at("j").get<int>();
        const int v = js.at("v").get<int>();
        WitnessLevel& L = fam.level(kind, j, v);
        L.kind = kind;
        L.j = j;
        L.v = v;
        L.e = js.at("e").get<long long>();
        L.degree = ladder_degree(kind, p.p, L.e);
        L.delta = js.at("delta").get<double>();
        L.delta_eff = js.at("delta_eff").get<double>();
        L.degenerate = js.at("degenerate").get<bool>();
        L.constructed = js.at("constructed").get<bool>();
        if (!L.constructed) {
            L.skip_reason = js.value("skip_reason", std::string("unknown"));
            continue;
        }
        L.ownership_complete = js.at("ownership_complete").get<bool>();
        L.lemma_bound = js.at("lemma_bound").get<double>();
        L.sampled_max = js.at("sampled_max").get<double>();
        L.le2 = js.at("le2").get<bool>();

        const json lj = read_file(dir / level_filename(L));
        L.gamma = separated_set_from_json(lj.at("set"));
        L.class_of = lj.at("class_of").get<std::vector<int>>();
        int n_classes = 0;
        for (int c : L.class_of) n_classes = std::max(n_classes, c + 1);
        L.classes.clear();
        for (int c = 0; c < n_classes; ++c) {
            L.classes.emplace_back(p.n, L.delta_eff, L.gamma.seed());
            L.classes.back().set_degenerate(L.degenerate);
        }
        for (size_t i = 0; i < L.gamma.size(); ++i)
            L.classes[static_cast<size_t>(L.class_of[i])].append(L.gamma.point(i));
    }
    return fam;
}

}  // namespace ballgap::io
