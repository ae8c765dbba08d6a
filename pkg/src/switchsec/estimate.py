"""Brute-force secure mode estimation from corrupted output data.

This is the executable meaning of distinguishability: a mode is
*consistent* with an observed output sequence when some admissible attack
(sensor support of size at most sigma, actuator support at most rho) and
some initial state reproduce the data exactly.  The search enumerates
supports combinatorially and solves a linear system per candidate, which
costs O(N * C(p, sigma) * C(m, rho)) solves; it is an oracle for the
deciders, not an efficient estimator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .exactla import EXACT, Matrix, hstack, restrict_rows, solve_exact
from .model import LinearMode, SwitchingSystem, mode_output_map

DEFAULT_REL_TOL = 1e-8

GENERIC_INPUT_CAVEAT = (
    "consistency with a controlled trace assumes the applied input is generic; "
    "a non-generic input can mask an otherwise distinguishable pair")


class EstimationError(ValueError):
    """No mode is consistent with the data at the given budgets."""


@dataclass(frozen=True)
class ConsistencyResult:
    """Whether one mode can explain the observed data, and how."""

    mode: object
    consistent: bool
    best_support: tuple[tuple[int, ...], tuple[int, ...]] | None
    x0_estimate: tuple | None
    residual: object
    caveat: str | None = None


def _delete_sensor_rows(stacked: Matrix, gamma: tuple[int, ...], p: int, tau: int) -> Matrix:
    if not gamma:
        return stacked
    drop = {t * p + (s - 1) + 1 for t in range(tau) for s in gamma}
    return restrict_rows(stacked, drop)


def _mode_consistency(mode: LinearMode, Y: Matrix, U: Matrix, sigma: int, rho: int,
                      tau: int, tol: float | None, caveat: str | None) -> ConsistencyResult:
    p, m = mode.p, mode.m
    gammas = list(combinations(range(1, p + 1), min(sigma, p)))
    deltas = list(combinations(range(1, m + 1), min(rho, m)))
    backend = mode.backend
    for gamma in gammas:
        for delta in deltas:
            O, T_u, T_d = mode_output_map(mode, tau, delta)
            rhs_full = Y - (T_u @ U if m else Matrix.zeros(tau * p, 1, backend))
            coeff = hstack(O, T_d)
            coeff_r = _delete_sensor_rows(coeff, gamma, p, tau)
            rhs_r = _delete_sensor_rows(rhs_full, gamma, p, tau)
            if backend == EXACT:
                sol = solve_exact(coeff_r, rhs_r)
                if sol is not None:
                    x0 = tuple(sol.column_vector()[:mode.n])
                    return ConsistencyResult(mode.id, True, (gamma, delta), x0, 0, caveat)
            else:
                a = coeff_r.to_numpy()
                b = rhs_r.to_numpy().ravel()
                if a.shape[1] == 0:
                    resid = float(np.linalg.norm(b))
                    sol_vec = np.zeros(0)
                else:
                    sol_vec, *_ = np.linalg.lstsq(a, b, rcond=None)
                    resid = float(np.linalg.norm(a @ sol_vec - b))
                scale = max(1.0, float(np.linalg.norm(Y.to_numpy())))
                threshold = (DEFAULT_REL_TOL if tol is None else tol) * scale
                if resid <= threshold:
                    return ConsistencyResult(mode.id, True, (gamma, delta),
                                             tuple(sol_vec[:mode.n]), resid, caveat)
    return ConsistencyResult(mode.id, False, None, None, None, caveat)


def consistent_modes(sys: SwitchingSystem, Y, U=None, sigma: int | None = None,
                     rho: int | None = None, tol: float | None = None) -> list[ConsistencyResult]:
    """All modes that can explain the stacked output Y given the known input U.

    ``Y`` is a sequence of 2n output samples (each of length p), ``U`` a
    sequence of inputs (each of length m; None means zero input).  For
    each mode and each support pair of maximal admissible size (deleting
    more rows and freeing more columns can only help, so smaller supports
    are redundant), the attacked sensor rows are deleted across all
    samples and the remaining rows are solved for the initial state and
    the actuator-attack values; the mode is consistent when the residual
    is exactly zero (rational backend) or below ``tol`` relative to the
    trace norm (float backend).
    """
    sigma = sys.sigma if sigma is None else sigma
    rho = sys.rho if rho is None else rho
    n, m, p = sys.n, sys.m, sys.p
    if not 0 <= sigma < p:
        raise ValueError(f"sigma must satisfy 0 <= sigma < p, got sigma={sigma}, p={p}")
    if not 0 <= rho <= m:
        raise ValueError(f"rho must satisfy 0 <= rho <= m, got rho={rho}, m={m}")
    tau = 2 * n
    Y = [tuple(row) for row in Y]
    if len(Y) != tau or any(len(row) != p for row in Y):
        raise ValueError(f"output data must be {tau} samples of {p} sensors "
                         f"(got {len(Y)} samples)")
    backend = sys.backend
    if U is None:
        U = [[0] * m for _ in range(tau)]
    U = [tuple(row) for row in U]
    if len(U) < tau - 1 or any(len(row) != m for row in U):
        raise ValueError(f"input data must provide at least {tau - 1} samples of length {m}")
    y_col = Matrix.column([x for row in Y for x in row], backend)
    u_col = Matrix.column([x for row in U[:tau - 1] for x in row], backend) \
        if m else Matrix.zeros(0, 1, backend)
    caveat = GENERIC_INPUT_CAVEAT if (m and any(x != 0 for row in U for x in row)) else None
    return [_mode_consistency(mode, y_col, u_col, sigma, rho, tau, tol, caveat)
            for mode in sys.modes]


@dataclass(frozen=True)
class EstimateResult:
    unique: bool
    mode: object | None
    results: tuple[ConsistencyResult, ...]


def estimate_mode(sys: SwitchingSystem, Y, U=None, sigma: int | None = None,
                  rho: int | None = None, tol: float | None = None) -> EstimateResult:
    """Identify the active mode when exactly one mode is consistent.

    Raises :class:`EstimationError` when no mode can explain the data at
    the given budgets (a model-mismatch signal).
    """
    results = consistent_modes(sys, Y, U, sigma, rho, tol)
    hits = [r for r in results if r.consistent]
    if not hits:
        raise EstimationError(
            "no consistent mode: the data cannot be explained by any mode "
            f"at budgets sigma={sys.sigma if sigma is None else sigma}, "
            f"rho={sys.rho if rho is None else rho}")
    if len(hits) == 1:
        return EstimateResult(True, hits[0].mode, tuple(results))
    return EstimateResult(False, None, tuple(results))
