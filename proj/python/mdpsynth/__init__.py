from ._core import (
    Mdp,
    brute_force_oracle,
    check_existence,
    evaluate_cost,
    grid_mdp,
    load_mdp_file,
    max_reach,
    optimal_values,
    parse_mdp,
    reach_prob,
    serialize_mdp,
    simulate,
    solve_exact,
    synth_approx,
    synth_discounted_baseline,
    synth_eps_optimal,
    synth_total_cost,
    validate,
)

__all__ = [
    "Mdp",
    "brute_force_oracle",
    "check_existence",
    "evaluate_cost",
    "grid_mdp",
    "load_mdp_file",
    "max_reach",
    "optimal_values",
    "parse_mdp",
    "reach_prob",
    "serialize_mdp",
    "simulate",
    "solve_exact",
    "synth_approx",
    "synth_discounted_baseline",
    "synth_eps_optimal",
    "synth_total_cost",
    "validate",
]
