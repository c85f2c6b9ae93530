// fracheat command-line front end: evaluate the fractional heat operator by
// any route, run extension solves, consistency certifications, and boundary
// Harnack experiments.  Exit codes: 0 ok, 1 tolerance failure, 2 config
// error, 3 numerical error.  Errors are mirrored as JSON on stderr.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracheat/csv_io.hpp"
#include "fracheat/extension.hpp"
#include "fracheat/fracop.hpp"
#include "fracheat/generate.hpp"
#include "fracheat/harnack.hpp"
#include "fracheat/kernels.hpp"
#include "fracheat/version.hpp"

using nlohmann::json;
using namespace fracheat;

namespace {

json default_config() {
    return json{
        {"s", 0.5},
        {"grid",
         {{"n", 1},
          {"Nx", 64},
          {"Nt", 32},
          {"L", 2.0 * std::numbers::pi},
          {"T", 1.0}}},
        {"method", "spectral"},
        {"field", {{"builtin", "gaussian-bump"}, {"params", json::object()}}},
    };
}

void deep_merge(json& base, const json& over) {
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (it->is_object() && base.contains(it.key()) && base[it.key()].is_object())
            deep_merge(base[it.key()], *it);
        else
            base[it.key()] = *it;
    }
}

double jnum(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw config_error("config: '" + key + "' must be a number");
    return j[key].get<double>();
}

int jint(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer())
        throw config_error("config: '" + key + "' must be an integer");
    return j[key].get<int>();
}

std::string jstr(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_string())
        throw config_error("config: '" + key + "' must be a string");
    return j[key].get<std::string>();
}

bool jbool(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean())
        throw config_error("config: '" + key + "' must be a boolean");
    return j[key].get<bool>();
}

SpaceTimeGrid grid_from(const json& cfg) {
    const json& g = cfg.at("grid");
    return make_grid(jint(g, "n", 1), jint(g, "Nx", 64), jint(g, "Nt", 32),
                     jnum(g, "L", 2.0 * std::numbers::pi), jnum(g, "T", 1.0));
}

// Input field: builtin generator or CSV; a CSV brings its own grid.
Field field_from(const json& cfg, const SpaceTimeGrid& g) {
    const json& fj = cfg.at("field");
    if (fj.contains("csv")) {
        const std::string path = fj["csv"].get<std::string>();
        if (!std::filesystem::exists(path))
            throw config_error("config: field CSV does not exist: " + path);
        return read_field_csv(path);
    }
    const std::string name = jstr(fj, "builtin", "gaussian-bump");
    std::map<std::string, double> params;
    if (fj.contains("params")) {
        if (!fj["params"].is_object())
            throw config_error("config: field.params must be an object");
        for (auto it = fj["params"].begin(); it != fj["params"].end(); ++it) {
            if (!it->is_number())
                throw config_error("config: field parameter '" + it.key() +
                                   "' must be a number");
            params[it.key()] = it->get<double>();
        }
    }
    return generate_builtin(name, params, g);
}

json provenance(const std::string& cmd, const json& cfg) {
    json p;
    p["tool"] = "fracheat";
    p["version"] = version_string;
    p["command"] = cmd;
    p["config"] = cfg;
    return p;
}

std::vector<std::string> provenance_comments(const std::string& cmd, const json& cfg,
                                             const SpaceTimeGrid& g, double s) {
    std::ostringstream grid;
    grid << "grid n=" << g.n << " Nx=" << g.Nx << " Nt=" << g.Nt
         << " L=" << format_double(g.L) << " T=" << format_double(g.T);
    return {std::string("fracheat ") + version_string, "command " + cmd,
            "s " + format_double(s), grid.str(), "config " + cfg.dump()};
}

std::string out_path(const json& cfg, const std::string& fallback) {
    return jstr(cfg, "out", fallback);
}

int emit_error(const char* type, const std::string& msg, double achieved, int code) {
    json e;
    e["error"] = {{"type", type}, {"message", msg}, {"achieved", achieved}};
    std::fprintf(stderr, "%s\n", e.dump().c_str());
    return code;
}

int run_kernel_mass(const json& cfg) {
    const FracParams p = make_params(jnum(cfg, "s", 0.5));
    const double tol = jnum(cfg, "tolerance", 1e-8);
    std::vector<double> heights{0.1, 1.0, 10.0};
    if (cfg.contains("heights")) {
        heights.clear();
        for (const auto& h : cfg["heights"]) heights.push_back(h.get<double>());
    }
    std::printf("# fracheat %s\n# command kernel-mass\n# s %s\n", version_string,
                format_double(p.s).c_str());
    double worst = 0.0;
    json masses = json::array();
    for (double y : heights) {
        const double m = kernel_mass(y, p);
        worst = std::max(worst, std::abs(m - 1.0));
        masses.push_back({{"y", y}, {"mass", m}});
        std::printf("kernel_mass(y=%s) = %s\n", format_double(y).c_str(),
                    format_double(m).c_str());
    }
    std::printf("max |mass - 1| = %s (tolerance %s)\n", format_double(worst).c_str(),
                format_double(tol).c_str());
    if (cfg.contains("out")) {
        json rep;
        rep["provenance"] = provenance("kernel-mass", cfg);
        rep["masses"] = masses;
        rep["max_abs_error"] = worst;
        rep["tolerance"] = tol;
        rep["pass"] = worst <= tol;
        write_text_atomic(out_path(cfg, "kernel_mass.json"), rep.dump(2) + "\n");
    }
    if (worst > tol)
        return emit_error("tolerance", "kernel mass deviates from 1", worst, 1);
    return 0;
}

int run_apply(const json& cfg) {
    const SpaceTimeGrid g0 = grid_from(cfg);
    const Field f = field_from(cfg, g0);
    const SpaceTimeGrid& g = f.grid;
    const FracParams p = make_params(jnum(cfg, "s", 0.5));
    const std::string method = jstr(cfg, "method", "spectral");

    Field result;
    if (method == "spectral") {
        result = apply_spectral(f, p);
    } else if (method == "singular") {
        const SingularQuadRule rule = make_singular_rule(p, g);
        result = apply_singular(f, p, rule);
    } else if (method == "extension") {
        std::vector<double> probes = default_probe_heights(g);
        if (cfg.contains("probes")) {
            probes.clear();
            for (const auto& v : cfg["probes"]) probes.push_back(v.get<double>());
        }
        result = apply_extension_route(f, p, probes);
    } else {
        throw config_error("config: method must be spectral, singular, or extension");
    }
    write_field_csv(out_path(cfg, "apply.csv"), result,
                    provenance_comments("apply", cfg, g, p.s));
    return 0;
}

int run_extend(const json& cfg) {
    const SpaceTimeGrid g0 = grid_from(cfg);
    const Field f = field_from(cfg, g0);
    const SpaceTimeGrid& g = f.grid;
    const FracParams p = make_params(jnum(cfg, "s", 0.5));
    const json ext = cfg.contains("extension") ? cfg["extension"] : json::object();

    const int J = jint(ext, "J", 64);
    const double Ymax = jnum(ext, "Ymax", 6.0);
    const ExtensionGrid eg = make_extension_grid(g, p, J, Ymax);

    const std::string mode = jstr(ext, "mode", "pde");
    ExtensionField u;
    if (mode == "poisson") {
        u = poisson_extend(f, p, eg);
    } else if (mode == "pde") {
        PdeOptions opt;
        opt.scheme = jstr(ext, "scheme", opt.scheme);
        opt.top = jstr(ext, "top", opt.top);
        opt.nsub = jint(ext, "nsub", opt.nsub);
        opt.min_periods = jint(ext, "min_periods", opt.min_periods);
        opt.max_periods = jint(ext, "max_periods", opt.max_periods);
        opt.period_tol = jnum(ext, "period_tol", opt.period_tol);
        opt.fixed_periods = jbool(ext, "fixed_periods", opt.fixed_periods);
        u = solve_extension_pde(f, p, eg, opt);
    } else {
        throw config_error("config: extension.mode must be 'pde' or 'poisson'");
    }

    const std::string out = out_path(cfg, "extend.csv");
    write_extension_csv(out, u, provenance_comments("extend", cfg, g, p.s));
    const int slice = jint(ext, "slice", -1);
    if (slice >= 0) {
        if (slice > eg.J()) throw config_error("config: extension.slice exceeds J");
        std::filesystem::path sp(out);
        sp.replace_extension(".slice" + std::to_string(slice) + ".csv");
        write_field_csv(sp.string(), extension_slice(u, slice),
                        provenance_comments("extend", cfg, g, p.s));
    }
    return 0;
}

int run_consistency(const json& cfg) {
    const SpaceTimeGrid g0 = grid_from(cfg);
    const Field f = field_from(cfg, g0);
    const FracParams p = make_params(jnum(cfg, "s", 0.5));
    const double tol = jnum(cfg, "tolerance", 5e-3);

    const RouteReport rep = consistency_report(f, p);
    bool pass = true;
    double worst = 0.0;
    json pairwise = json::object();
    for (const auto& kv : rep.pairwise) {
        pairwise[kv.first] = {{"sup_rel", kv.second.sup_rel},
                              {"l2_rel", kv.second.l2_rel}};
        worst = std::max(worst, kv.second.l2_rel);
        if (kv.second.l2_rel > tol) pass = false;
    }
    json out;
    out["provenance"] = provenance("consistency", cfg);
    out["routes"] = rep.route_names;
    out["calibration"] = rep.calibration;
    out["pairwise"] = pairwise;
    out["tolerance"] = tol;
    out["worst_l2_rel"] = worst;
    out["pass"] = pass;
    write_text_atomic(out_path(cfg, "consistency.json"), out.dump(2) + "\n");
    if (!pass)
        return emit_error("tolerance", "route discrepancy exceeds tolerance", worst, 1);
    return 0;
}

int run_harnack(const json& cfg) {
    const json hj = cfg.contains("harnack") ? cfg["harnack"] : json::object();
    ExperimentSpec spec;
    spec.s = jnum(cfg, "s", 0.5);
    const double M = jnum(hj, "M", 0.0);
    const double Lx = jnum(hj, "Lx", 4.0);
    spec.phi = M > 0.0 ? wedge_phi(Lx, M) : flat_phi(Lx);
    if (hj.contains("slab")) {
        if (!hj["slab"].is_array() || hj["slab"].size() != 2)
            throw config_error("config: harnack.slab must be [y_lo, y_hi]");
        spec.y_lo = hj["slab"][0].get<double>();
        spec.y_hi = hj["slab"][1].get<double>();
    }
    if (hj.contains("mesh")) {
        if (!hj["mesh"].is_array() || hj["mesh"].size() != 2)
            throw config_error("config: harnack.mesh must be [nx, ny]");
        spec.nx = hj["mesh"][0].get<int>();
        spec.ny = hj["mesh"][1].get<int>();
    }
    spec.nt = jint(hj, "nt", spec.nt);
    spec.T = jnum(hj, "T", spec.T);
    spec.delta = jnum(hj, "delta", spec.delta);
    spec.t0 = jnum(hj, "t0", spec.t0);
    spec.r = jnum(hj, "r", spec.r);
    spec.depth = jint(hj, "depth", spec.depth);
    spec.xhat = jnum(hj, "xhat", spec.xhat);
    spec.quotient_tol = jnum(hj, "tol", spec.quotient_tol);
    auto read_bump = [&](const char* key, ExperimentSpec::BumpSpec& b) {
        if (!hj.contains(key)) return;
        const json& bj = hj[key];
        b.cx = jnum(bj, "cx", b.cx);
        b.cy = jnum(bj, "cy", b.cy);
        b.w = jnum(bj, "w", b.w);
        b.amp = jnum(bj, "amp", b.amp);
    };
    read_bump("data_u", spec.data_u);
    read_bump("data_v", spec.data_v);

    const ExperimentResult res = run_experiment(spec);

    const std::string out = out_path(cfg, "harnack.json");
    std::filesystem::path csvp(out);
    csvp.replace_extension(".csv");
    std::ostringstream csv;
    csv << "# fracheat " << version_string << "\n# command harnack\n# s "
        << format_double(spec.s) << "\n# config " << cfg.dump() << '\n';
    csv << "k,r_k,osc_k\n";
    for (std::size_t k = 0; k < res.prof.r_k.size(); ++k)
        csv << k << ',' << format_double(res.prof.r_k[k]) << ','
            << format_double(res.prof.osc_k[k]) << '\n';
    write_text_atomic(csvp.string(), csv.str());

    json summary;
    summary["provenance"] = provenance("harnack", cfg);
    if (res.prof.exact)
        summary["alpha"] = "exact";
    else if (res.prof.r2 >= 0.9)
        summary["alpha"] = res.prof.alpha;
    else
        summary["alpha"] = nullptr; // fit quality too low to report
    summary["alpha_fit"] = res.prof.alpha_fit;
    summary["c"] = res.prof.c;
    summary["r2"] = res.prof.r2;
    summary["exact"] = res.prof.exact;
    summary["used_scales"] = res.prof.used_scales;
    summary["corkscrew"] = {{"x", res.A.A[0]},
                            {"y", res.A.A[1]},
                            {"r", res.A.r},
                            {"u", res.u_at_A},
                            {"v", res.v_at_A},
                            {"quotient", res.prof.corkscrew_quotient}};
    summary["interior"] = {{"sup", res.interior_sup}, {"inf", res.interior_inf}};
    json scales = json::array();
    for (std::size_t k = 0; k < res.prof.r_k.size(); ++k)
        scales.push_back({{"k", k},
                          {"r", res.prof.r_k[k]},
                          {"osc", res.prof.osc_k[k]},
                          {"qmin", res.prof.qmin_k[k]},
                          {"qmax", res.prof.qmax_k[k]}});
    summary["scales"] = scales;
    write_text_atomic(out, summary.dump(2) + "\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracheat: fractional heat operator (d/dt - Lap)^s toolkit"};
    app.require_subcommand(1);

    std::string config_path, method, out;
    double s_flag = -1.0;
    int nx = 0, nt = 0;
    const char* names[5] = {"kernel-mass", "apply", "extend", "consistency", "harnack"};
    const char* descs[5] = {"check unit mass of the extension kernel",
                            "apply the operator to a field",
                            "solve the weighted extension PDE",
                            "cross-validate the three routes",
                            "boundary Harnack quotient experiment"};
    for (int k = 0; k < 5; ++k) {
        CLI::App* sc = app.add_subcommand(names[k], descs[k]);
        sc->add_option("--config", config_path, "JSON config file")
            ->check(CLI::ExistingFile);
        sc->add_option("--s", s_flag, "fractional order in (0,1)");
        sc->add_option("--nx", nx, "spatial points per axis");
        sc->add_option("--nt", nt, "time points");
        sc->add_option("--method", method, "spectral|singular|extension");
        sc->add_option("--out", out, "output path");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return emit_error("config", e.what(), 0.0, exit_config);
    }

    const std::string cmd = app.get_subcommands()[0]->get_name();
    CLI::App* sc = app.get_subcommands()[0];

    try {
        json cfg = default_config();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            json user;
            try {
                in >> user;
            } catch (const json::exception& e) {
                throw config_error(std::string("config: JSON parse failure: ") + e.what());
            }
            if (!user.is_object()) throw config_error("config: root must be an object");
            deep_merge(cfg, user);
        }
        if (sc->count("--s")) cfg["s"] = s_flag;
        if (sc->count("--nx")) cfg["grid"]["Nx"] = nx;
        if (sc->count("--nt")) cfg["grid"]["Nt"] = nt;
        if (sc->count("--method")) cfg["method"] = method;
        if (sc->count("--out")) cfg["out"] = out;

        if (cmd == "kernel-mass") return run_kernel_mass(cfg);
        if (cmd == "apply") return run_apply(cfg);
        if (cmd == "extend") return run_extend(cfg);
        if (cmd == "consistency") return run_consistency(cfg);
        if (cmd == "harnack") return run_harnack(cfg);
        throw config_error("unknown command: " + cmd);
    } catch (const config_error& e) {
        return emit_error("config", e.what(), 0.0, exit_config);
    } catch (const numerical_error& e) {
        return emit_error("numerical", e.what(), e.achieved, exit_numerical);
    } catch (const std::exception& e) {
        return emit_error("internal", e.what(), 0.0, exit_numerical);
    }
}
