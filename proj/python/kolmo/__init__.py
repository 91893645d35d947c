"""Spectral toolkit for convex gradient systems and their elliptic
Kolmogorov equations: Gibbs sampling, SDE integration, Monte Carlo
resolvents and weighted-grid elliptic solves."""

from ._core import (  # noqa: F401
    BasisSpec,
    CompositePotential,
    EllipticSolution,
    EstimateReport,
    GridSpec,
    InvariantDensity,
    ResolventEstimate,
    RngSpec,
    SampleBatch,
    ScalarPotential,
    SdeConfig,
    StateFunctional,
    WeightedEnsemble,
    WeightedGrid,
    __version__,
    analyze,
    apply_q_power,
    contractivity_ratio,
    covariance_kernel,
    du,
    du_alpha,
    du_cahn_hilliard,
    eigenvalue,
    invariant_density,
    make_functional,
    make_potential,
    my_gap,
    nu_expect,
    reproduce,
    resolvent_mc,
    run,
    sample_mu,
    scalar_prox,
    simulate,
    solve,
    synthesize,
    u_eval,
    u_moreau,
    weight,
)
