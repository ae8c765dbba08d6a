"""Controlled-invariant subspace computations for augmented pairs.

The central object is the maximal (A, B)-controlled invariant subspace
contained in the kernel of a restricted output map: the largest W with
``A W <= W + Im(B)`` and ``W <= ker(Cbar)``.  It is computed by the
classical fixed-point recursion

    V_0 = ker(Cbar),   V_{k+1} = V_k  intersect  A^{-1}(V_k + Im(B)),

which is monotone decreasing and stabilizes within the ambient dimension.
On the exact backend every inclusion below is decided with zero tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactla import Matrix, Subspace, hstack, image, kernel, preimage, restrict_rows
from .model import AugmentedPair


@dataclass(frozen=True)
class InvariantResult:
    """Maximal controlled invariant subspace and how it was obtained."""

    W: Subspace
    iterations: int
    gamma: tuple[int, ...] = ()


def max_controlled_invariant(A: Matrix, Bfull: Matrix, Cbar: Matrix,
                             gamma: tuple[int, ...] = ()) -> InvariantResult:
    """Largest subspace W with A W <= W + Im(Bfull) inside ker(Cbar).

    ``Bfull`` may have zero columns (no control authority); ``Cbar`` may
    have zero rows (no retained sensors), in which case W is the full
    state space.
    """
    if A.rows != A.cols:
        raise ValueError("A must be square")
    if Bfull.rows != A.rows:
        raise ValueError("Bfull must have as many rows as A")
    if Cbar.cols != A.rows:
        raise ValueError("Cbar must have as many columns as A")
    im_b = image(Bfull)
    V = kernel(Cbar)
    iterations = 0
    while True:
        V_next = V.intersect(preimage(A, V.sum(im_b)))
        iterations += 1
        if V_next.dim == V.dim:
            # V_next <= V by construction, so equal dimension means a fixed point.
            return InvariantResult(V_next, iterations, tuple(sorted(gamma)))
        V = V_next


def pair_invariant(pair: AugmentedPair, gamma: tuple[int, ...]) -> InvariantResult:
    """Maximal controlled invariant of the pair after deleting sensors in gamma.

    The control authority is the honest input map together with both
    actuator-attack injections.
    """
    cbar = restrict_rows(pair.C, gamma)
    bfull = hstack(pair.B, pair.Bhat_i, pair.Bhat_j)
    return max_controlled_invariant(pair.A, bfull, cbar, gamma=tuple(gamma))


@dataclass(frozen=True)
class OmegaResult:
    """Existence check for the attacker's winning set of initial-state pairs."""

    exists: bool
    omega: Subspace | None
    invariant: InvariantResult


def omega_star(pair: AugmentedPair, gamma: tuple[int, ...]) -> OmegaResult:
    """The maximal set of initial-state pairs from which the two outputs can be
    held equal for every honest input and every attack on mode i, by a
    suitable attack on mode j.  It exists iff the honest input map and the
    mode-i attack map both land inside the invariant subspace; it then
    equals that subspace.
    """
    inv = pair_invariant(pair, gamma)
    demand = image(hstack(pair.B, pair.Bhat_i))
    if inv.W.includes(demand):
        return OmegaResult(True, inv.W, inv)
    return OmegaResult(False, None, inv)


def solvable(pair: AugmentedPair, gamma: tuple[int, ...]) -> bool:
    """True when mode j can always reproduce mode i's corrupted output.

    Tests Im(B) + Im(Bhat_i) <= W + Im(Bhat_j): every honest input and
    every actuator attack on mode i can be absorbed by some initial-state
    pair and actuator attack on mode j without changing the retained
    output difference.
    """
    inv = pair_invariant(pair, gamma)
    lhs = image(pair.B).sum(image(pair.Bhat_i))
    rhs = inv.W.sum(image(pair.Bhat_j))
    return rhs.includes(lhs)
