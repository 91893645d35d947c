#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "kolmo/config.hpp"
#include "kolmo/runner.hpp"

using namespace kolmo;
namespace fs = std::filesystem;

namespace {

const char* kBaseline = R"(
# small reaction-diffusion baseline
geometry.kind = reaction_diffusion
geometry.modes = 8
potential.name = zero
potential.alpha = 0.0
measure.samples = 400
measure.seed = 91
sde.dt = 2e-3
sde.horizon = 0.5
elliptic.dim = 1
elliptic.nodes = 64
elliptic.lambda = 1.0
)";

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("config parsing: native and json encodings agree") {
    const Config a = Config::from_string("alpha.beta = 1.5 # comment\nname = quartic\n");
    CHECK(a.get("alpha.beta", "") == "1.5");
    CHECK(a.get_double("alpha.beta", 0.0) == doctest::Approx(1.5));
    CHECK(a.get("name", "") == "quartic");

    const Config b = Config::from_string(R"({"alpha": {"beta": "1.5"}, "name": "quartic"})");
    CHECK(b.canonical() == a.canonical());
    CHECK(b.hash() == a.hash());

    CHECK_THROWS(Config::from_string("no equals sign here"));
    CHECK_THROWS_WITH(Config::from_string("x = abc").get_double("x", 0.0),
                      doctest::Contains("x"));
}

TEST_CASE("validation errors carry the field path") {
    Config cfg = Config::from_string(kBaseline);
    cfg.set("potential.alpha", "-0.5");
    try {
        (void)run_subcommand("sample", cfg, fresh_dir("kolmo_badalpha").string());
        FAIL("expected a validation error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("potential.alpha") != std::string::npos);
    }

    Config bad_kind = Config::from_string(kBaseline);
    bad_kind.set("geometry.kind", "torus");
    CHECK_THROWS_WITH((void)run_subcommand("sample", bad_kind, fresh_dir("kolmo_badkind").string()),
                      doctest::Contains("geometry.kind"));
}

TEST_CASE("sample writes artifacts and a manifest that reproduces bitwise") {
    const fs::path dir = fresh_dir("kolmo_cli_sample");
    const Config cfg = Config::from_string(kBaseline);
    const RunResult res = run_subcommand("sample", cfg, dir.string());
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(dir / "ensemble.csv"));
    CHECK(fs::exists(dir / "ensemble.json"));
    CHECK(fs::exists(dir / "manifest.json"));

    CHECK(reproduce((dir / "manifest.json").string()) == 0);

    // A corrupted hash record must make the replay comparison fail.
    std::ifstream in(dir / "manifest.json");
    std::string manifest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    const auto pos = manifest.find("\"fnv64\": \"");
    REQUIRE(pos != std::string::npos);
    manifest[pos + 10] = (manifest[pos + 10] == '0') ? '1' : '0';
    write_text_file((dir / "manifest.json").string(), manifest);
    CHECK(reproduce((dir / "manifest.json").string()) == 1);
}

TEST_CASE("determinism across runs of every subcommand") {
    Config cfg = Config::from_string(kBaseline);
    cfg.set("resolvent.paths", "200");
    cfg.set("resolvent.f", "tanh_c1");
    for (const std::string sub : {"sample", "simulate", "solve", "resolve"}) {
        const fs::path d1 = fresh_dir("kolmo_det1_" + sub);
        const fs::path d2 = fresh_dir("kolmo_det2_" + sub);
        const RunResult r1 = run_subcommand(sub, cfg, d1.string());
        const RunResult r2 = run_subcommand(sub, cfg, d2.string());
        CHECK(r1.exit_code == 0);
        REQUIRE(r1.artifacts == r2.artifacts);
        for (const auto& rel : r1.artifacts)
            CHECK(file_fnv1a64((d1 / rel).string()) == file_fnv1a64((d2 / rel).string()));
    }
}

TEST_CASE("simulate dumps a path when asked") {
    const fs::path dir = fresh_dir("kolmo_cli_path");
    Config cfg = Config::from_string(kBaseline);
    cfg.set("sde.dump_every", "50");
    const RunResult res = run_subcommand("simulate", cfg, dir.string());
    CHECK(res.exit_code == 0);
    REQUIRE(fs::exists(dir / "path.csv"));
    std::ifstream in(dir / "path.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,c_1,c_2,c_3,c_4,c_5,c_6,c_7,c_8");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 250 / 50 + 1);  // 250 steps, one row per 50, plus the initial state
}

TEST_CASE("verify on the small baseline passes and reports") {
    const fs::path dir = fresh_dir("kolmo_cli_verify");
    Config cfg = Config::from_string(kBaseline);
    cfg.set("verify.samples", "4000");
    cfg.set("verify.moment_samples", "4000");
    cfg.set("verify.fk_paths", "400");
    cfg.set("geometry.modes", "8");
    const RunResult res = run_subcommand("verify", cfg, dir.string());
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(dir / "reports.json"));
    CHECK(fs::exists(dir / "reports.csv"));
    CHECK(fs::exists(dir / "h_refinement.csv"));

    std::ifstream in(dir / "reports.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "name,lhs,rhs,slack,se,budget,verdict,provenance");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows >= 12);
}

TEST_CASE("invariant subcommand emits a monotone contraction sweep") {
    const fs::path dir = fresh_dir("kolmo_cli_invariant");
    Config cfg = Config::from_string(kBaseline);
    cfg.set("potential.name", "quartic");
    cfg.set("elliptic.lambda", "8.0");
    cfg.set("perturbation.name", "tanh(0.3)");
    const RunResult res = run_subcommand("invariant", cfg, dir.string());
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(dir / "rho.csv"));
    CHECK(fs::exists(dir / "invariant.json"));

    std::ifstream in(dir / "lambda_sweep.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "lambda,contraction_factor");
    double prev = 2.0;
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        const double factor = std::stod(line.substr(line.find(',') + 1));
        CHECK(factor < prev);
        prev = factor;
        ++rows;
    }
    CHECK(rows == 8);
}

TEST_CASE("report bundle writers") {
    const fs::path dir = fresh_dir("kolmo_cli_reports");
    CHECK_THROWS(write_reports({}, (dir / "r.json").string(), (dir / "r.csv").string()));
    const EstimateReport one = make_report("only", 1.0, 2.0, 0.0, 0.0, false, "p");
    write_reports({one}, (dir / "r.json").string(), (dir / "r.csv").string());
    std::ifstream in(dir / "r.csv");
    std::string header, row, extra;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(!std::getline(in, extra));
    CHECK(row.find("only") == 0);
    CHECK(row.find("pass") != std::string::npos);
}

TEST_CASE("environment override for the output directory") {
    const fs::path wanted = fresh_dir("kolmo_cli_envdir");
    setenv("KOLMO_OUT_DIR", wanted.string().c_str(), 1);
    const Config cfg = Config::from_string(kBaseline);
    const RunResult res = run_subcommand("sample", cfg, fresh_dir("kolmo_cli_ignored").string());
    unsetenv("KOLMO_OUT_DIR");
    CHECK(fs::exists(wanted / "ensemble.csv"));
    CHECK(res.manifest_path == (wanted / "manifest.json").string());
}

TEST_CASE("unknown subcommand is rejected") {
    const Config cfg = Config::from_string(kBaseline);
    CHECK_THROWS(run_subcommand("frobnicate", cfg, fresh_dir("kolmo_cli_unknown").string()));
}

TEST_SUITE_END();
