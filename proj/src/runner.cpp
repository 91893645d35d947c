#include "kolmo/runner.hpp"

#include <cmath>
#include <numbers>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "kolmo/feynman_kac.hpp"
#include "kolmo/harness.hpp"
#include "kolmo/measure.hpp"
#include "kolmo/sde.hpp"

namespace fs = std::filesystem;

namespace kolmo {

namespace {

constexpr const char* kToolVersion = "0.1.0";

Vec parse_state(const std::string& text, int modes, double default_scale) {
    Vec x = Vec::Zero(modes);
    if (text.empty() || text == "origin") return x;
    if (text == "sigma1") {
        x[0] = default_scale;
        return x;
    }
    std::stringstream ss(text);
    std::string tok;
    int k = 0;
    while (std::getline(ss, tok, ',') && k < modes) x[k++] = std::stod(tok);
    return x;
}

Scheme scheme_from(const Config& cfg) {
    const std::string s = cfg.get("sde.scheme", "semi_implicit");
    if (s == "semi_implicit") return Scheme::SemiImplicitLinear;
    if (s == "explicit_em") return Scheme::ExplicitEM;
    throw std::runtime_error("config: sde.scheme: unknown scheme '" + s + "'");
}

SdeConfig sde_from_config(const Config& cfg) {
    SdeConfig s;
    s.dt = config_positive(cfg, "sde.dt", 1e-3);
    s.horizon = config_positive(cfg, "sde.horizon", 1.0);
    s.scheme = scheme_from(cfg);
    s.alpha = config_nonnegative(cfg, "potential.alpha", 0.0);
    s.rng.seed = static_cast<std::uint64_t>(cfg.get_int("measure.seed", 2026));
    s.rng.stream = static_cast<std::uint64_t>(cfg.get_int("sde.stream", 0));
    return s;
}

Vec nodal_rhs(const WeightedGrid& grid, const std::string& name) {
    Vec f(grid.total());
    if (name == "one") {
        f.setOnes();
    } else if (name == "coordinate") {
        for (int i = 0; i < grid.total(); ++i) f[i] = grid.coord(i, 0);
    } else if (name == "gauss_bump") {
        for (int i = 0; i < grid.total(); ++i) {
            double s2 = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                const double t = grid.coord(i, a) / grid.sigma(a);
                s2 += t * t;
            }
            f[i] = std::exp(-0.5 * s2);
        }
    } else if (name == "mixed") {
        for (int i = 0; i < grid.total(); ++i) {
            double s2 = 0.0;
            for (int a = 0; a < grid.dim(); ++a) {
                const double t = grid.coord(i, a) / grid.sigma(a);
                s2 += t * t;
            }
            f[i] = grid.coord(i, 0) + std::exp(-0.5 * s2);
        }
    } else {
        const StateFunctional fn = make_functional(name);
        Vec x(grid.dim());
        for (int i = 0; i < grid.total(); ++i) {
            for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coord(i, a);
            f[i] = fn.eval(x);
        }
    }
    return f;
}

/// Coarse cell centers sit halfway between paired fine centers; the average
/// of the two children reproduces the coarse coordinate to second order.
double fine_value_at_coarse_node(const EllipticSolution& fine, int coarse_axis_index) {
    return 0.5 * (fine.u[2 * coarse_axis_index] + fine.u[2 * coarse_axis_index + 1]);
}

struct ManifestWriter {
    std::string outdir;
    std::string subcommand;
    const Config* cfg;
    std::vector<std::string> artifacts;

    void add(const std::string& rel) { artifacts.push_back(rel); }

    std::string write() const {
        nlohmann::json m;
        m["subcommand"] = subcommand;
        nlohmann::json cfg_json = nlohmann::json::object();
        for (const auto& [k, v] : cfg->values()) cfg_json[k] = v;
        m["config"] = cfg_json;
        m["config_hash"] = cfg->hash();
        m["tool_version"] = kToolVersion;
        nlohmann::json arts = nlohmann::json::array();
        for (const auto& rel : artifacts) {
            std::ostringstream hex;
            hex << std::hex << file_fnv1a64((fs::path(outdir) / rel).string());
            arts.push_back({{"file", rel}, {"fnv64", hex.str()}});
        }
        m["artifacts"] = arts;
        const std::string path = (fs::path(outdir) / "manifest.json").string();
        write_text_file(path, m.dump(2) + "\n");
        return path;
    }
};

int run_sample(const Config& cfg, const std::string& outdir, ManifestWriter& mw) {
    const BasisSpec spec = basis_from_config(cfg);
    const CompositePotential pot = potential_from_config(cfg);
    const int n = cfg.get_int("measure.samples", 10000);
    if (n < 1) throw std::runtime_error("config: measure.samples: must be >= 1");
    RngSpec rng{static_cast<std::uint64_t>(cfg.get_int("measure.seed", 2026)),
                static_cast<std::uint64_t>(cfg.get_int("measure.stream", 0))};
    const SampleBatch batch = sample_mu(spec, n, rng);
    const WeightedEnsemble ens = weight(batch, pot);
    export_ensemble_csv(ens, (fs::path(outdir) / "ensemble.csv").string());
    write_text_file((fs::path(outdir) / "ensemble.json").string(),
                    ensemble_manifest_json(ens) + "\n");
    mw.add("ensemble.csv");
    mw.add("ensemble.json");
    return 0;
}

int run_simulate(const Config& cfg, const std::string& outdir, ManifestWriter& mw) {
    const BasisSpec spec = basis_from_config(cfg);
    const CompositePotential pot = potential_from_config(cfg);
    const SdeConfig scfg = sde_from_config(cfg);
    SdeEngine engine(pot, scfg);
    SpectralBasis basis(spec);
    const Vec x0 = parse_state(cfg.get("sde.x0", "origin"), spec.modes,
                               std::sqrt(basis.eigenvalue(1)));
    const int dump_every = cfg.get_int("sde.dump_every", 0);

    std::ostringstream path_csv;
    path_csv.precision(17);
    path_csv << "t";
    for (int k = 1; k <= spec.modes; ++k) path_csv << ",c_" << k;
    path_csv << "\n";

    Vec second_moment = Vec::Zero(spec.modes);
    double time_avg_l2 = 0.0;
    int tail_count = 0;
    const int steps = engine.steps();
    const auto observer = [&](int s, double t, const Vec& state) {
        if (dump_every > 0 && s % dump_every == 0) {
            path_csv << t;
            for (int k = 0; k < spec.modes; ++k) path_csv << "," << state[k];
            path_csv << "\n";
        }
        if (s > steps / 2) {
            double l2 = 0.0;
            for (int k = 0; k < spec.modes; ++k) {
                const double scale =
                    (spec.kind == Geometry::CahnHilliard) ? (std::numbers::pi * (k + 1)) : 1.0;
                l2 += scale * scale * state[k] * state[k];
                second_moment[k] += state[k] * state[k];
            }
            time_avg_l2 += l2;
            ++tail_count;
        }
    };
    const Vec xT = engine.simulate(x0, observer);
    if (tail_count > 0) {
        second_moment /= tail_count;
        time_avg_l2 /= tail_count;
    }

    if (dump_every > 0) {
        write_text_file((fs::path(outdir) / "path.csv").string(), path_csv.str());
        mw.add("path.csv");
    }
    nlohmann::json summary;
    summary["endpoint"] = std::vector<double>(xT.data(), xT.data() + xT.size());
    summary["time_average_l2"] = time_avg_l2;
    summary["mode_second_moments"] =
        std::vector<double>(second_moment.data(), second_moment.data() + second_moment.size());
    summary["steps"] = steps;
    write_text_file((fs::path(outdir) / "summary.json").string(), summary.dump(2) + "\n");
    mw.add("summary.json");
    return 0;
}

int run_resolve(const Config& cfg, const std::string& outdir, ManifestWriter& mw) {
    const CompositePotential pot = potential_from_config(cfg);
    SpectralBasis basis(pot.geometry);
    ResolventQuery q;
    q.lambda = config_positive(cfg, "resolvent.lambda", 1.0);
    q.f = make_functional(cfg.get("resolvent.f", "tanh_c1"));
    q.x0 = parse_state(cfg.get("resolvent.x0", "sigma1"), pot.geometry.modes,
                       std::sqrt(basis.eigenvalue(1)));
    q.horizon = cfg.get_double("resolvent.horizon", 0.0);
    q.paths = cfg.get_int("resolvent.paths", 10000);
    q.sde = sde_from_config(cfg);
    const ResolventEstimate est = resolvent_mc(q, pot);

    nlohmann::json j;
    j["value"] = est.value;
    j["se"] = est.se;
    j["tail_bias"] = est.tail_bias;
    j["quad_bias"] = est.quad_bias;
    j["horizon"] = est.horizon;
    j["paths"] = est.paths;
    j["sup_bound_ok"] = est.sup_bound_ok;
    j["outside_proven_scope"] = est.outside_proven_scope;
    write_text_file((fs::path(outdir) / "resolvent.json").string(), j.dump(2) + "\n");
    mw.add("resolvent.json");
    return est.sup_bound_ok ? 0 : 1;
}

GridSpec grid_from_config(const Config& cfg) {
    GridSpec g;
    g.dim = cfg.get_int("elliptic.dim", 1);
    g.nodes = cfg.get_int("elliptic.nodes", 128);
    g.half_width = config_positive(cfg, "elliptic.half_width", 6.0);
    if (g.dim < 1 || g.dim > 3) throw std::runtime_error("config: elliptic.dim: must be 1..3");
    if (g.nodes < 8) throw std::runtime_error("config: elliptic.nodes: must be >= 8");
    return g;
}

int run_solve(const Config& cfg, const std::string& outdir, ManifestWriter& mw) {
    const CompositePotential pot = potential_from_config(cfg);
    const GridSpec gspec = grid_from_config(cfg);
    const double lambda = config_positive(cfg, "elliptic.lambda", 1.0);
    const std::string fname = cfg.get("elliptic.f", "mixed");

    WeightedGrid grid(pot.geometry.kind, pot.profile, gspec);
    const EllipticSolution sol = solve(grid, lambda, nodal_rhs(grid, fname));
    GridSpec fine = gspec;
    fine.nodes *= 2;
    WeightedGrid fgrid(pot.geometry.kind, pot.profile, fine);
    const EllipticSolution fsol = solve(fgrid, lambda, nodal_rhs(fgrid, fname));
    const auto reports = check_regularity_suite(grid, sol, fgrid, fsol, cfg.hash());

    std::ostringstream csv;
    csv.precision(17);
    for (int a = 0; a < grid.dim(); ++a) csv << "x_" << (a + 1) << ",";
    csv << "u";
    for (int a = 0; a < grid.dim(); ++a) csv << ",du_" << (a + 1);
    csv << "\n";
    for (int i = 0; i < grid.total(); ++i) {
        for (int a = 0; a < grid.dim(); ++a) csv << grid.coord(i, a) << ",";
        csv << sol.u[i];
        for (int a = 0; a < grid.dim(); ++a) csv << "," << sol.du(i, a);
        csv << "\n";
    }
    write_text_file((fs::path(outdir) / "solution.csv").string(), csv.str());
    mw.add("solution.csv");

    nlohmann::json j;
    j["lambda"] = lambda;
    j["dim"] = gspec.dim;
    j["nodes"] = gspec.nodes;
    j["half_width"] = gspec.half_width;
    j["residual"] = sol.residual;
    j["reports"] = nlohmann::json::parse(reports_to_json(reports));
    write_text_file((fs::path(outdir) / "solution.json").string(), j.dump(2) + "\n");
    mw.add("solution.json");

    bool all_pass = true;
    for (const auto& r : reports) all_pass = all_pass && r.pass;
    return all_pass ? 0 : 1;
}

int run_invariant(const Config& cfg, const std::string& outdir, ManifestWriter& mw) {
    const CompositePotential pot = potential_from_config(cfg);
    const GridSpec gspec = grid_from_config(cfg);
    const double lambda = config_positive(cfg, "elliptic.lambda", 8.0);
    const bool upwind = cfg.get_bool("perturbation.upwind", true);
    const DriftScheme scheme = upwind ? DriftScheme::Upwind : DriftScheme::Centered;

    WeightedGrid grid(pot.geometry.kind, pot.profile, gspec);
    const Mat field = make_vector_field(grid, cfg.get("perturbation.name", "zero"));
    const InvariantDensity inv = invariant_density(grid, lambda, field, scheme);

    // Contraction-factor sweep for the plot data.
    std::ostringstream sweep;
    sweep.precision(17);
    sweep << "lambda,contraction_factor\n";
    const Vec f = nodal_rhs(grid, "gauss_bump");
    for (double lam : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0}) {
        const PerturbedSolution ps = perturbed_solve(grid, lam, f, field, scheme);
        sweep << lam << "," << ps.contraction_factor << "\n";
    }
    write_text_file((fs::path(outdir) / "lambda_sweep.csv").string(), sweep.str());
    mw.add("lambda_sweep.csv");

    std::ostringstream csv;
    csv.precision(17);
    for (int a = 0; a < grid.dim(); ++a) csv << "x_" << (a + 1) << ",";
    csv << "rho\n";
    for (int i = 0; i < grid.total(); ++i) {
        for (int a = 0; a < grid.dim(); ++a) csv << grid.coord(i, a) << ",";
        csv << inv.rho[i] << "\n";
    }
    write_text_file((fs::path(outdir) / "rho.csv").string(), csv.str());
    mw.add("rho.csv");

    nlohmann::json j;
    j["eigenvalue"] = inv.eigenvalue;
    j["min_rho"] = inv.min_rho;
    j["max_invariance_residual"] = inv.max_invariance_residual;
    j["iterations"] = inv.iterations;
    j["lambda"] = lambda;
    j["upwind"] = upwind;
    write_text_file((fs::path(outdir) / "invariant.json").string(), j.dump(2) + "\n");
    mw.add("invariant.json");
    return 0;
}

int run_verify(const Config& cfg, const std::string& outdir, ManifestWriter& mw) {
    const BasisSpec spec = basis_from_config(cfg);
    const CompositePotential pot = potential_from_config(cfg);
    const std::string prov = cfg.hash();
    std::vector<EstimateReport> reports;

    // Monte Carlo identity checks on one weighted ensemble.
    const int n = cfg.get_int("verify.samples", 20000);
    RngSpec rng{static_cast<std::uint64_t>(cfg.get_int("measure.seed", 2026)), 0};
    const WeightedEnsemble ens = weight(sample_mu(spec, n, rng), pot);

    const auto gauss = make_cylinder_function("gauss_c1");
    const auto c1g = make_cylinder_function("c1_gauss");
    const auto tanh1 = make_cylinder_function("tanh_c1");
    const auto c1 = make_cylinder_function("c1");
    const auto one = make_cylinder_function("one");

    reports.push_back(check_ibp(1, gauss, gauss, ens, pot, prov));
    reports.push_back(check_ibp(1, c1g, gauss, ens, pot, prov));
    reports.push_back(check_ibp(std::min(2, spec.modes), tanh1, gauss, ens, pot, prov));
    reports.push_back(check_symmetry(gauss, c1g, ens, pot, prov));
    reports.push_back(check_symmetry(tanh1, gauss, ens, pot, prov));
    reports.push_back(check_poincare(c1, ens, prov));
    reports.push_back(check_poincare(tanh1, ens, prov));
    reports.push_back(check_logsob(one, ens, prov));
    reports.push_back(check_logsob(tanh1, ens, prov));

    if (spec.kind == Geometry::ReactionDiffusion && !pot.profile.is_zero)
        reports.push_back(check_my_gap_suite(pot, cfg.get_int("verify.gap_draws", 1000),
                                             {rng.seed, 77}, prov));

    for (auto& r :
         check_gaussian_moments(spec, cfg.get_int("verify.moment_samples", n), {rng.seed, 11}, prov))
        reports.push_back(r);

    // Truncation sweep of the second moment. No convergence rate is
    // asserted; successive increments must only keep shrinking (Cauchy
    // behavior), and the sweep is emitted as plot data.
    {
        std::ostringstream nsweep;
        nsweep.precision(17);
        nsweep << "modes,estimate,se\n";
        std::vector<double> values;
        double max_se = 0.0;
        const int sweep_n = cfg.get_int("verify.moment_samples", n);
        for (const int modes : {4, 8, 16, 32}) {
            const BasisSpec s = make_basis(spec.kind, modes);
            const LpMomentReport rep = check_lp_moment(s, 2, 2, sweep_n, {rng.seed, 12});
            values.push_back(rep.estimate);
            max_se = std::max(max_se, rep.se);
            nsweep << modes << "," << rep.estimate << "," << rep.se << "\n";
        }
        write_text_file((fs::path(outdir) / "truncation_sweep.csv").string(), nsweep.str());
        mw.add("truncation_sweep.csv");
        const double inc1 = std::abs(values[1] - values[0]);
        const double inc2 = std::abs(values[2] - values[1]);
        const double inc3 = std::abs(values[3] - values[2]);
        reports.push_back(make_report("truncation_cauchy", inc3, std::min(inc1, inc2),
                                      2.0 * max_se, 0.0, false, prov));
    }

    // Elliptic regularity suite plus the resolvent cross-check at dim 1.
    const double lambda = config_positive(cfg, "elliptic.lambda", 1.0);
    GridSpec gspec = grid_from_config(cfg);
    WeightedGrid grid(pot.geometry.kind, pot.profile, gspec);
    const Vec f = nodal_rhs(grid, cfg.get("elliptic.f", "mixed"));
    const EllipticSolution sol = solve(grid, lambda, f);
    GridSpec fine = gspec;
    fine.nodes *= 2;
    WeightedGrid fgrid(pot.geometry.kind, pot.profile, fine);
    const EllipticSolution fsol = solve(fgrid, lambda, nodal_rhs(fgrid, cfg.get("elliptic.f", "mixed")));
    for (auto& r : check_regularity_suite(grid, sol, fgrid, fsol, prov)) reports.push_back(r);

    // h-refinement plot data.
    std::ostringstream href;
    href.precision(17);
    href << "nodes,second_order_identity_residual\n";
    for (int m : {gspec.nodes / 2, gspec.nodes, 2 * gspec.nodes}) {
        GridSpec gs = gspec;
        gs.nodes = m;
        WeightedGrid g(pot.geometry.kind, pot.profile, gs);
        const EllipticSolution s = solve(g, lambda, nodal_rhs(g, cfg.get("elliptic.f", "mixed")));
        const RegularityQuantities q = regularity_quantities(g, s);
        const double lhs = lambda * q.int_du2 + 0.5 * q.int_tr_d2u2 + 0.5 * q.int_qdu2 +
                           q.int_d2u_dudu;
        href << m << "," << (lhs - q.rhs_identity) << "\n";
    }
    write_text_file((fs::path(outdir) / "h_refinement.csv").string(), href.str());
    mw.add("h_refinement.csv");

    if (gspec.dim == 1 && spec.kind == Geometry::ReactionDiffusion) {
        CompositePotential pot1{pot.profile, make_basis(spec.kind, 1, 64)};
        WeightedGrid grid1(pot1.geometry.kind, pot1.profile, gspec);
        const EllipticSolution sol1 = solve(grid1, lambda, nodal_rhs(grid1, "tanh_c1"));
        WeightedGrid grid1f(pot1.geometry.kind, pot1.profile, fine);
        const EllipticSolution sol1f = solve(grid1f, lambda, nodal_rhs(grid1f, "tanh_c1"));
        ResolventQuery q;
        q.lambda = lambda;
        q.f = make_functional("tanh_c1");
        q.paths = cfg.get_int("verify.fk_paths", 2000);
        q.sde = sde_from_config(cfg);
        q.sde.rng.stream = 1 << 20;
        const int mid = grid1.total() / 2;
        const double gb =
            3.0 * std::abs(sol1.u[mid] - fine_value_at_coarse_node(sol1f, mid)) + 1e-9;
        reports.push_back(check_fk_vs_galerkin(q, pot1, grid1, sol1, {mid}, gb, prov));
    }

    write_reports(reports, (fs::path(outdir) / "reports.json").string(),
                  (fs::path(outdir) / "reports.csv").string());
    mw.add("reports.json");
    mw.add("reports.csv");

    bool all_pass = true;
    for (const auto& r : reports) {
        std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.name << " lhs=" << r.lhs
                  << " rhs=" << r.rhs << " se=" << r.se << " budget=" << r.budget << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

BasisSpec basis_from_config(const Config& cfg) {
    const std::string kind_s = cfg.get("geometry.kind", "reaction_diffusion");
    Geometry kind;
    if (kind_s == "reaction_diffusion" || kind_s == "rd")
        kind = Geometry::ReactionDiffusion;
    else if (kind_s == "cahn_hilliard" || kind_s == "ch")
        kind = Geometry::CahnHilliard;
    else
        throw std::runtime_error("config: geometry.kind: unknown kind '" + kind_s + "'");
    const int modes = cfg.get_int("geometry.modes", 16);
    const int grid = cfg.get_int("geometry.grid", 0);
    try {
        return make_basis(kind, modes, grid);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config: geometry: ") + e.what());
    }
}

CompositePotential potential_from_config(const Config& cfg) {
    const double alpha = cfg.get_double("potential.alpha", 0.0);
    if (alpha < 0.0) throw std::runtime_error("config: potential.alpha: must be nonnegative");
    try {
        return CompositePotential{make_potential(cfg.get("potential.name", "zero")),
                                  basis_from_config(cfg)};
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config: potential.name: ") + e.what());
    }
}

RunResult run_subcommand(const std::string& subcommand, const Config& cfg,
                         const std::string& outdir_in) {
    std::string outdir = outdir_in;
    if (const char* env = std::getenv("KOLMO_OUT_DIR"); env && *env) outdir = env;
    fs::create_directories(outdir);

    ManifestWriter mw{outdir, subcommand, &cfg, {}};
    int code;
    if (subcommand == "sample")
        code = run_sample(cfg, outdir, mw);
    else if (subcommand == "simulate")
        code = run_simulate(cfg, outdir, mw);
    else if (subcommand == "resolve")
        code = run_resolve(cfg, outdir, mw);
    else if (subcommand == "solve")
        code = run_solve(cfg, outdir, mw);
    else if (subcommand == "invariant")
        code = run_invariant(cfg, outdir, mw);
    else if (subcommand == "verify")
        code = run_verify(cfg, outdir, mw);
    else
        throw std::runtime_error("unknown subcommand '" + subcommand + "'");

    RunResult res;
    res.exit_code = code;
    res.artifacts = mw.artifacts;
    res.manifest_path = mw.write();
    return res;
}

int reproduce(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("reproduce: cannot open " + manifest_path);
    nlohmann::json m = nlohmann::json::parse(in);
    Config cfg;
    for (const auto& [k, v] : m.at("config").items()) cfg.set(k, v.get<std::string>());
    const std::string subcommand = m.at("subcommand").get<std::string>();

    const fs::path base = fs::path(manifest_path).parent_path();
    const fs::path replay = base / ("_reproduce_" + cfg.hash());
    fs::remove_all(replay);

    // The replay must not be hijacked by the environment override.
    const char* saved = std::getenv("KOLMO_OUT_DIR");
    std::string saved_value = saved ? saved : "";
    if (saved) unsetenv("KOLMO_OUT_DIR");
    RunResult res;
    try {
        res = run_subcommand(subcommand, cfg, replay.string());
    } catch (...) {
        if (saved) setenv("KOLMO_OUT_DIR", saved_value.c_str(), 1);
        throw;
    }
    if (saved) setenv("KOLMO_OUT_DIR", saved_value.c_str(), 1);

    int mismatches = 0;
    for (const auto& art : m.at("artifacts")) {
        const std::string rel = art.at("file").get<std::string>();
        const std::string recorded = art.at("fnv64").get<std::string>();
        std::ostringstream hex;
        hex << std::hex << file_fnv1a64((replay / rel).string());
        if (hex.str() != recorded) {
            ++mismatches;
            std::cerr << "reproduce: mismatch in " << rel << " (recorded " << recorded
                      << ", replay " << hex.str() << ")\n";
        }
    }
    if (mismatches == 0) {
        std::cout << "reproduce: " << m.at("artifacts").size()
                  << " artifact(s) bitwise identical\n";
        fs::remove_all(replay);
        return 0;
    }
    std::cerr << "reproduce: " << mismatches << " artifact(s) differ; replay kept in " << replay
              << "\n";
    return 1;
}

}  // namespace kolmo
