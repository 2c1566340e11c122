"""Concavification solver and smoothness diagnostics for costly information."""

from ._core import (
    Cost,
    Error,
    Menu,
    check_ie,
    check_iia,
    counterexample,
    custom_pwq_cost,
    entropy_cost,
    jdd,
    kinked_cost,
    kinked_cost_at,
    lambda_set,
    menu,
    psi,
    quadratic_cost,
    recover,
    run_cli,
    solve,
)

__all__ = [
    "Cost",
    "Error",
    "Menu",
    "check_ie",
    "check_iia",
    "counterexample",
    "custom_pwq_cost",
    "entropy_cost",
    "jdd",
    "kinked_cost",
    "kinked_cost_at",
    "lambda_set",
    "menu",
    "psi",
    "quadratic_cost",
    "recover",
    "run_cli",
    "solve",
]
