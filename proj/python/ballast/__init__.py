"""ballast: a laboratory for balanced allocations with binary queries.

The heavy lifting lives in the compiled extension ``ballast._core``; this
package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    ALPHA1,
    ALPHA2,
    ChainMajorizationReport,
    CouplingReport,
    EmpiricalReport,
    ExpansionPrecondition,
    GapDistribution,
    LoadState,
    MixingResult,
    MixtureDecomposition,
    PrefixBoundReport,
    Process,
    RegularGraph,
    RelaxedEntrywiseReport,
    RelaxedMajorizedReport,
    RunResult,
    SplitMix64,
    VerifyCheck,
    Xoshiro256StarStar,
    __version__,
    analytic_vector,
    analytic_vector_exact,
    coupled_run,
    d_choice,
    describe,
    empirical_vector,
    enum_vector,
    expander_quantile_precondition,
    expansion_prefix_bounds_check,
    gamma_potential,
    gap_distribution,
    graphical,
    graphical_vector,
    graphical_vector_exact,
    is_connected,
    is_process_name,
    load_graph,
    lower_bound_threshold,
    make_complete,
    make_cycle,
    make_hypercube,
    make_random_regular,
    make_uniform_quantiles,
    mixing_check,
    one_choice,
    one_plus_beta,
    phi,
    prefix_majorizes,
    psi,
    quantile,
    quantile_threshold_mixture,
    relaxed_quantile_entrywise,
    relaxed_quantile_majorized,
    rep_seed,
    resolve_m,
    run,
    run_verify,
    save_graph,
    spectral_expansion,
    spectral_expansion_dense,
    spectral_expansion_power,
    step,
    threshold,
    threshold_equiv_quantile,
    thinning,
    thinning_chain_check,
    thinning_equivalence_check,
    two_choice,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
