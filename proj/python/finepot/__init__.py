"""Discrete p-energy obstacle problems, capacities and fine topology."""

from ._finepot import (
    Error,
    Space,
    ball,
    condenser_capacity,
    graph,
    grid,
    mazya_constant,
    p_to_one_energies,
    path,
    poincare_constant,
    run_criterion,
    sha256_text,
    sobolev_capacity,
    solve,
    solve_config,
    swiss_cheese_report,
    variational_capacity,
    weighted_line_solution,
)

__all__ = [
    "Error",
    "Space",
    "ball",
    "condenser_capacity",
    "graph",
    "grid",
    "mazya_constant",
    "p_to_one_energies",
    "path",
    "poincare_constant",
    "run_criterion",
    "sha256_text",
    "sobolev_capacity",
    "solve",
    "solve_config",
    "swiss_cheese_report",
    "variational_capacity",
    "weighted_line_solution",
]
