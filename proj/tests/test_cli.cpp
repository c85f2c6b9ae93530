#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

#include "fracheat/csv_io.hpp"
#include "fracheat/generate.hpp"
#include "fracheat/grid.hpp"

using namespace fracheat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliFixture {
    fs::path bin;
    fs::path dir;
    bool available = false;

    CliFixture() {
        const char* env = std::getenv("FRACHEAT_BIN");
        if (!env || !fs::exists(env)) return;
        bin = fs::path(env);
        dir = fs::temp_directory_path() / ("fracheat_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        available = true;
    }
    ~CliFixture() {
        if (available) {
            std::error_code ec;
            fs::remove_all(dir, ec);
        }
    }

    // run the binary inside the scratch dir; returns the exit code
    int run(const std::string& args, std::string* out = nullptr,
            std::string* err = nullptr) const {
        fs::path of = dir / "stdout.txt", ef = dir / "stderr.txt";
        std::string cmd = "cd " + dir.string() + " && " + bin.string() + " " + args +
                          " >" + of.string() + " 2>" + ef.string();
        int rc = std::system(cmd.c_str());
        if (out) *out = slurp(of);
        if (err) *err = slurp(ef);
        REQUIRE(rc != -1);
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_config(const std::string& name, const json& j) const {
        std::ofstream out(dir / name);
        out << j.dump(2) << "\n";
    }
};

json parse_error_json(const std::string& stderr_text) {
    auto pos = stderr_text.find('{');
    REQUIRE(pos != std::string::npos);
    return json::parse(stderr_text.substr(pos));
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("kernel-mass: pass, report, tolerance failure") {
    CliFixture cli;
    if (!cli.available) {
        MESSAGE("FRACHEAT_BIN not set; skipping CLI tests");
        return;
    }
    std::string out;
    CHECK(cli.run("kernel-mass --s 0.3 --out mass.json", &out) == 0);
    CHECK(out.find("kernel_mass(y=") != std::string::npos);
    json rep = json::parse(cli.slurp(cli.dir / "mass.json"));
    CHECK(rep["pass"].get<bool>());
    REQUIRE(rep["masses"].size() == 3);
    for (const auto& m : rep["masses"])
        CHECK(std::abs(m["mass"].get<double>() - 1.0) <= 1e-8);
    CHECK(rep["provenance"]["tool"] == "fracheat");

    // unreachable tolerance flips the exit code to 1 with a JSON error
    cli.write_config("tight.json", json{{"s", 0.3}, {"tolerance", 1e-18}});
    std::string err;
    CHECK(cli.run("kernel-mass --config tight.json", nullptr, &err) == 1);
    json e = parse_error_json(err);
    CHECK(e["error"]["type"] == "tolerance");
    CHECK(e["error"]["achieved"].get<double>() > 1e-18);
}

TEST_CASE("apply: constant data maps to zero, outputs are deterministic") {
    CliFixture cli;
    if (!cli.available) return;
    json cfg{{"s", 0.5},
             {"grid", {{"n", 1}, {"Nx", 16}, {"Nt", 8}}},
             {"method", "spectral"},
             {"field", {{"builtin", "constant"}, {"params", {{"c", 2.0}}}}}};
    cli.write_config("apply.json", cfg);
    CHECK(cli.run("apply --config apply.json --out a1.csv") == 0);
    Field r1 = read_field_csv((cli.dir / "a1.csv").string());
    CHECK(r1.grid.Nx == 16);
    CHECK(r1.max_abs() <= 1e-12);

    // identical invocation reproduces the file byte for byte
    std::string first = cli.slurp(cli.dir / "a1.csv");
    CHECK(cli.run("apply --config apply.json --out a1.csv") == 0);
    CHECK(first == cli.slurp(cli.dir / "a1.csv"));

    // provenance comments are present; no wall-clock stamps anywhere
    std::string text = cli.slurp(cli.dir / "a1.csv");
    CHECK(text.find("# command apply") != std::string::npos);
    CHECK(text.find("time:") == std::string::npos);
}

TEST_CASE("apply: singular method agrees with spectral output") {
    CliFixture cli;
    if (!cli.available) return;
    json cfg{{"s", 0.5},
             {"grid", {{"n", 1}, {"Nx", 16}, {"Nt", 8}}},
             {"field", {{"builtin", "mode"}, {"params", {{"kx", 1.0}, {"kt", 1.0}}}}}};
    cli.write_config("m.json", cfg);
    CHECK(cli.run("apply --config m.json --method spectral --out sp.csv") == 0);
    CHECK(cli.run("apply --config m.json --method singular --out si.csv") == 0);
    Field sp = read_field_csv((cli.dir / "sp.csv").string());
    Field si = read_field_csv((cli.dir / "si.csv").string());
    auto [sup, l2] = norms(si, sp);
    CHECK(sup <= 1e-3);
    (void)l2;
}

TEST_CASE("consistency: pass report and forced failure") {
    CliFixture cli;
    if (!cli.available) return;
    json cfg{{"s", 0.5},
             {"grid", {{"n", 1}, {"Nx", 32}, {"Nt", 16}}},
             {"field", {{"builtin", "mode"}, {"params", {{"kx", 1.0}, {"kt", 1.0}}}}}};
    cli.write_config("c.json", cfg);
    CHECK(cli.run("consistency --config c.json --out rep.json") == 0);
    json rep = json::parse(cli.slurp(cli.dir / "rep.json"));
    CHECK(rep["pass"].get<bool>());
    REQUIRE(rep["routes"].size() == 3);
    REQUIRE(rep["pairwise"].size() == 3);
    for (auto it = rep["pairwise"].begin(); it != rep["pairwise"].end(); ++it)
        CHECK((*it)["l2_rel"].get<double>() <= 5e-3);
    CHECK(rep["calibration"]["extension"].get<double>() > 0.0);

    cfg["tolerance"] = 1e-15;
    cli.write_config("cf.json", cfg);
    std::string err;
    CHECK(cli.run("consistency --config cf.json --out repf.json", nullptr, &err) == 1);
    CHECK(parse_error_json(err)["error"]["type"] == "tolerance");
    json repf = json::parse(cli.slurp(cli.dir / "repf.json"));
    CHECK(!repf["pass"].get<bool>()); // report still written on failure
}

TEST_CASE("extend: csv artifacts with the trace row preserved") {
    CliFixture cli;
    if (!cli.available) return;
    json cfg{{"s", 0.4},
             {"grid", {{"n", 1}, {"Nx", 16}, {"Nt", 8}}},
             {"field", {{"builtin", "gaussian-bump"}, {"params", json::object()}}},
             {"extension",
              {{"J", 16}, {"Ymax", 3.0}, {"mode", "poisson"}, {"slice", 0}}}};
    cli.write_config("e.json", cfg);
    CHECK(cli.run("extend --config e.json --out ext.csv") == 0);
    std::string text = cli.slurp(cli.dir / "ext.csv");
    CHECK(text.rfind("# extgrid", 0) == 0);

    // slice 0 equals the generated input field bit-for-bit
    Field slice = read_field_csv((cli.dir / "ext.slice0.csv").string());
    SpaceTimeGrid g = make_grid(1, 16, 8, slice.grid.L, slice.grid.T);
    Field f = generate_builtin("gaussian-bump", {}, g);
    bool same = slice.values.size() == f.values.size();
    for (std::size_t i = 0; same && i < f.values.size(); ++i)
        if (slice.values[i] != f.values[i]) same = false;
    CHECK(same);
}

TEST_CASE("harnack: summary and profile files") {
    CliFixture cli;
    if (!cli.available) return;
    json cfg{{"s", 0.5},
             {"harnack",
              {{"M", 0.0},
               {"Lx", 4.0},
               {"mesh", {24, 24}},
               {"nt", 48},
               {"t0", 0.6},
               {"r", 0.6},
               {"depth", 3}}}};
    cli.write_config("h.json", cfg);
    CHECK(cli.run("harnack --config h.json --out h.json.out") == 0);
    json sum = json::parse(cli.slurp(cli.dir / "h.json.out"));
    CHECK(sum.contains("alpha"));
    CHECK(sum["r2"].is_number());
    REQUIRE(sum["scales"].size() == 3);
    CHECK(sum["corkscrew"]["u"].get<double>() > 0.0);
    std::string csv = cli.slurp(cli.dir / "h.json.csv");
    CHECK(csv.find("k,r_k,osc_k") != std::string::npos);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows >= 4); // comments + header + 3 scales
}

TEST_CASE("exit codes: config errors and parse errors map to 2") {
    CliFixture cli;
    if (!cli.available) return;
    std::string err;

    CHECK(cli.run("apply --s 1.5", nullptr, &err) == 2); // s out of range
    CHECK(parse_error_json(err)["error"]["type"] == "config");

    CHECK(cli.run("apply --config does_not_exist.json", nullptr, &err) == 2);
    CHECK(parse_error_json(err)["error"]["type"] == "config");

    std::ofstream(cli.dir / "broken.json") << "{ not json";
    CHECK(cli.run("apply --config broken.json", nullptr, &err) == 2);
    CHECK(parse_error_json(err)["error"]["type"] == "config");

    CHECK(cli.run("no-such-command", nullptr, &err) == 2);
    CHECK(cli.run("", nullptr, &err) == 2); // a subcommand is required

    cli.write_config("badmethod.json", json{{"method", "bogus"}});
    CHECK(cli.run("apply --config badmethod.json", nullptr, &err) == 2);
    CHECK(parse_error_json(err)["error"]["type"] == "config");

    std::string out;
    CHECK(cli.run("--help", &out) == 0);
    CHECK(out.find("kernel-mass") != std::string::npos);
}

} // TEST_SUITE
