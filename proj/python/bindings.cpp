#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kolmo/feynman_kac.hpp"
#include "kolmo/galerkin.hpp"
#include "kolmo/harness.hpp"
#include "kolmo/measure.hpp"
#include "kolmo/runner.hpp"
#include "kolmo/sde.hpp"

namespace py = pybind11;
using namespace kolmo;

namespace {

BasisSpec basis_args(const std::string& kind, int modes, int grid) {
    Geometry g;
    if (kind == "reaction_diffusion" || kind == "rd")
        g = Geometry::ReactionDiffusion;
    else if (kind == "cahn_hilliard" || kind == "ch")
        g = Geometry::CahnHilliard;
    else
        throw std::invalid_argument("kind must be 'reaction_diffusion' or 'cahn_hilliard'");
    return make_basis(g, modes, grid);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral toolkit for convex gradient systems: Gibbs sampling, SDE "
              "integration, Monte Carlo resolvents and weighted-grid elliptic solves.";

    py::class_<BasisSpec>(m, "BasisSpec")
        .def(py::init([](const std::string& kind, int modes, int grid) {
                 return basis_args(kind, modes, grid);
             }),
             py::arg("kind"), py::arg("modes"), py::arg("grid") = 0)
        .def_readonly("modes", &BasisSpec::modes)
        .def_readonly("grid_points", &BasisSpec::grid_points)
        .def_property_readonly("kind", [](const BasisSpec& s) {
            return s.kind == Geometry::ReactionDiffusion ? "reaction_diffusion" : "cahn_hilliard";
        });

    m.def("eigenvalue", [](const BasisSpec& s, int k) { return eigenvalue(s, k); },
          py::arg("spec"), py::arg("k"));
    m.def("covariance_kernel", [](double s, double t) {
        return covariance_kernel(s, t, Geometry::ReactionDiffusion);
    });
    m.def("synthesize",
          [](const BasisSpec& s, const Vec& c) { return SpectralBasis(s).synthesize(c); });
    m.def("analyze", [](const BasisSpec& s, const Vec& g) { return SpectralBasis(s).analyze(g); });
    m.def("apply_q_power", [](const BasisSpec& s, const Vec& c, double theta) {
        return SpectralBasis(s).apply_q_power(c, theta);
    });

    py::class_<ScalarPotential>(m, "ScalarPotential")
        .def_readonly("name", &ScalarPotential::name)
        .def("value", [](const ScalarPotential& p, double t) { return p.value(t); })
        .def("deriv", [](const ScalarPotential& p, double t) { return p.deriv(t); });
    m.def("make_potential", &make_potential, py::arg("descriptor"));
    m.def("scalar_prox", [](double t, double alpha, const ScalarPotential& phi) {
        return scalar_prox(t, ProxParams{alpha}, phi);
    });

    py::class_<CompositePotential>(m, "CompositePotential")
        .def(py::init([](const ScalarPotential& phi, const BasisSpec& s) {
            return CompositePotential{phi, s};
        }));
    m.def("u_eval", &u_eval);
    m.def("u_moreau", &u_moreau);
    m.def("du", &du);
    m.def("du_alpha", &du_alpha);
    m.def("du_cahn_hilliard", &du_cahn_hilliard);
    m.def("my_gap", &my_gap);

    py::class_<RngSpec>(m, "RngSpec")
        .def(py::init([](std::uint64_t seed, std::uint64_t stream) {
                 return RngSpec{seed, stream};
             }),
             py::arg("seed"), py::arg("stream") = 0);

    py::class_<SampleBatch>(m, "SampleBatch")
        .def_readonly("coeffs", &SampleBatch::coeffs)
        .def("size", &SampleBatch::size);
    py::class_<WeightedEnsemble>(m, "WeightedEnsemble")
        .def_readonly("z_hat", &WeightedEnsemble::z_hat)
        .def_readonly("ess", &WeightedEnsemble::ess)
        .def("weight", &WeightedEnsemble::weight);
    m.def("sample_mu", &sample_mu, py::arg("spec"), py::arg("n"), py::arg("rng"));
    m.def("weight", &weight, py::arg("batch"), py::arg("potential"));
    m.def("nu_expect", [](const WeightedEnsemble& ens, const std::function<double(const Vec&)>& g) {
        const NuEstimate e = nu_expect(ens, g);
        return py::make_tuple(e.value, e.se);
    });

    py::class_<SdeConfig>(m, "SdeConfig")
        .def(py::init([](double dt, double horizon, const std::string& scheme, double alpha,
                         const RngSpec& rng) {
                 SdeConfig c;
                 c.dt = dt;
                 c.horizon = horizon;
                 c.scheme = (scheme == "explicit_em") ? Scheme::ExplicitEM
                                                      : Scheme::SemiImplicitLinear;
                 c.alpha = alpha;
                 c.rng = rng;
                 return c;
             }),
             py::arg("dt"), py::arg("horizon"), py::arg("scheme") = "semi_implicit",
             py::arg("alpha") = 0.0, py::arg("rng") = RngSpec{0, 0})
        .def_readwrite("dt", &SdeConfig::dt)
        .def_readwrite("horizon", &SdeConfig::horizon)
        .def_readwrite("alpha", &SdeConfig::alpha);
    m.def("simulate", [](const Vec& x0, const CompositePotential& pot, const SdeConfig& cfg) {
        return SdeEngine(pot, cfg).simulate(x0);
    });
    m.def("contractivity_ratio", &contractivity_ratio);

    py::class_<StateFunctional>(m, "StateFunctional")
        .def_readonly("name", &StateFunctional::name)
        .def("__call__", [](const StateFunctional& f, const Vec& x) { return f.eval(x); });
    m.def("make_functional", &make_functional);

    py::class_<ResolventEstimate>(m, "ResolventEstimate")
        .def_readonly("value", &ResolventEstimate::value)
        .def_readonly("se", &ResolventEstimate::se)
        .def_readonly("tail_bias", &ResolventEstimate::tail_bias)
        .def_readonly("quad_bias", &ResolventEstimate::quad_bias)
        .def_readonly("sup_bound_ok", &ResolventEstimate::sup_bound_ok)
        .def_property_readonly("bias", &ResolventEstimate::bias);
    m.def(
        "resolvent_mc",
        [](double lambda, const StateFunctional& f, const Vec& x0, int paths,
           const SdeConfig& sde, const CompositePotential& pot, double horizon) {
            ResolventQuery q;
            q.lambda = lambda;
            q.f = f;
            q.x0 = x0;
            q.paths = paths;
            q.sde = sde;
            q.horizon = horizon;
            return resolvent_mc(q, pot);
        },
        py::arg("lambda_"), py::arg("f"), py::arg("x0"), py::arg("paths"), py::arg("sde"),
        py::arg("potential"), py::arg("horizon") = 0.0);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](int dim, int nodes, double half_width) {
                 return GridSpec{dim, nodes, half_width};
             }),
             py::arg("dim") = 1, py::arg("nodes") = 64, py::arg("half_width") = 6.0);
    py::class_<WeightedGrid>(m, "WeightedGrid")
        .def(py::init([](const CompositePotential& pot, const GridSpec& gs) {
            return WeightedGrid(pot.geometry.kind, pot.profile, gs);
        }))
        .def("total", &WeightedGrid::total)
        .def("coord", &WeightedGrid::coord)
        .def_property_readonly("weights", [](const WeightedGrid& g) { return g.weights(); });
    py::class_<EllipticSolution>(m, "EllipticSolution")
        .def_readonly("u", &EllipticSolution::u)
        .def_readonly("residual", &EllipticSolution::residual)
        .def_readonly("lambda_", &EllipticSolution::lambda);
    m.def("solve", [](const WeightedGrid& g, double lambda, const Vec& f) {
        return solve(g, lambda, f);
    });
    py::class_<InvariantDensity>(m, "InvariantDensity")
        .def_readonly("rho", &InvariantDensity::rho)
        .def_readonly("eigenvalue", &InvariantDensity::eigenvalue)
        .def_readonly("min_rho", &InvariantDensity::min_rho);
    m.def(
        "invariant_density",
        [](const WeightedGrid& g, double lambda, const std::string& field, bool upwind) {
            return invariant_density(g, lambda, make_vector_field(g, field),
                                     upwind ? DriftScheme::Upwind : DriftScheme::Centered);
        },
        py::arg("grid"), py::arg("lambda_"), py::arg("field") = "zero", py::arg("upwind") = true);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("name", &EstimateReport::name)
        .def_readonly("lhs", &EstimateReport::lhs)
        .def_readonly("rhs", &EstimateReport::rhs)
        .def_readonly("se", &EstimateReport::se)
        .def_readonly("budget", &EstimateReport::budget)
        .def_readonly("pass_", &EstimateReport::pass)
        .def("__repr__", [](const EstimateReport& r) {
            return "<EstimateReport " + r.name + (r.pass ? " pass>" : " FAIL>");
        });

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config_text,
           const std::string& outdir) {
            const Config cfg = Config::from_string(config_text);
            const RunResult res = run_subcommand(subcommand, cfg, outdir);
            return py::make_tuple(res.exit_code, res.manifest_path);
        },
        py::arg("subcommand"), py::arg("config_text"), py::arg("outdir"));
    m.def("reproduce", &reproduce, py::arg("manifest_path"));

    m.attr("__version__") = "0.1.0";
}
