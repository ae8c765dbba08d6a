"""Pairwise mode-distinguishability deciders under sparse attacks.

Four questions are answered for a pair of modes, all reduced to exact
rank / subspace-inclusion tests:

* input-generic distinguishability of the nominal pair (the stacked
  input-to-output-difference map is nonzero);
* distinguishability of the nominal autonomous pair (the joint
  observability matrix has full column rank 2n);
* sigma-secure distinguishability of the autonomous pair: full column
  rank must survive the deletion of every admissible set of attacked
  sensors (combined support at most 2*sigma);
* sigma/rho-secure distinguishability of the controlled pair: for every
  admissible tuple of sensor and actuator supports, neither mode's
  honest-plus-attack reachable directions may be absorbed by the other
  mode's invariant subspace and attack authority.

Whenever the sensor-deletion rank test fails, an explicit witness is
constructed: an initial-state pair plus a pair of cyclic sparse sensor
attacks that make the two corrupted outputs identical sample-by-sample.

Enumeration is sequential and lexicographic, so the first failing
pattern reported is deterministic.  By default only the decisive
frontier of support sets is checked (justified by monotonicity: deleting
more sensors only shrinks rank, and enlarging an attack support only
helps the attacker); ``exhaustive=True`` sweeps every admissible tuple.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exactla import EXACT, Matrix, image, kernel, rank, restrict_rows, vstack
from .geocontrol import pair_invariant
from .model import (
    AttackPattern,
    AugmentedPair,
    LinearMode,
    SwitchingSystem,
    build_augmented,
    markov_matrices,
    observability_matrix,
)

KIND_INPUT_GENERIC = "input_generic"
KIND_AUTONOMOUS = "autonomous"
KIND_SIGMA_SECURE = "sigma_secure_autonomous"
KIND_SIGMA_RHO_SECURE = "sigma_rho_secure_controlled"


class BudgetError(ValueError):
    """An attack budget violates the decidability bound."""


def _check_sensor_budget(sigma: int, p: int):
    if sigma < 0:
        raise BudgetError(f"sigma must be nonnegative, got {sigma}")
    if 2 * sigma >= p:
        raise BudgetError(
            f"the condition 2*sigma < p has to be satisfied: got sigma={sigma}, p={p} "
            f"(at most {(p - 1) // 2} attacked sensors are tolerable with {p} sensors)")


@dataclass(frozen=True)
class Witness:
    """An indistinguishability certificate for an autonomous pair.

    Replaying mode i from ``x0[:n]`` under sensor attack ``wi`` and mode j
    from ``x0[n:]`` under ``wj`` produces identical outputs for tau
    samples.  Supports are cyclic: ``wi`` is nonzero only on sensors in
    ``gamma_i``, ``wj`` only on ``gamma_j``.
    """

    x0: tuple
    gamma_i: tuple[int, ...]
    gamma_j: tuple[int, ...]
    wi: tuple[tuple, ...]
    wj: tuple[tuple, ...]


@dataclass(frozen=True)
class Verdict:
    """Outcome of one decider for one ordered-as-given mode pair."""

    kind: str
    pair: tuple
    result: bool
    failing_pattern: AttackPattern | None = None
    witness: Witness | None = None
    checked_patterns: int = 0
    gamma_ranks: tuple | None = None


def _restricted_observability(pair: AugmentedPair, gamma: tuple[int, ...],
                              steps: int | None = None) -> Matrix:
    """Joint observability stack with the sensors in gamma deleted from every sample."""
    steps = pair.tau if steps is None else steps
    cbar = restrict_rows(pair.C, gamma)
    blocks = []
    CA = cbar
    for _ in range(steps):
        blocks.append(CA)
        CA = CA @ pair.A
    return vstack(*blocks)


def input_generic_distinguishable(Si: LinearMode, Sj: LinearMode) -> Verdict:
    """Nominal pair distinguishable for all initial states and generic inputs.

    Holds exactly when the stacked input map of the output difference is
    nonzero, so it is decided by inspection of those Markov blocks.
    """
    if Si.m == 0:
        raise ValueError(
            "input-generic distinguishability needs an input channel (m >= 1); "
            "use autonomous_distinguishable for autonomous modes")
    pair = build_augmented(Si, Sj)
    # 2n+1 block rows expose the Markov parameters C A^k B for k = 0..2n-1;
    # by Cayley-Hamilton every later parameter is a combination of these, so
    # the stack is zero iff the whole impulse response of the difference is.
    input_map, _, _ = markov_matrices(pair, steps=pair.tau + 1)
    return Verdict(KIND_INPUT_GENERIC, (Si.id, Sj.id), not input_map.is_zero())


def autonomous_distinguishable(Si: LinearMode, Sj: LinearMode) -> Verdict:
    """Nominal autonomous pair distinguishable for every nonzero initial-state pair.

    Holds exactly when the joint observability matrix has full column
    rank 2n.  Input matrices are ignored.
    """
    pair = build_augmented(Si, Sj)
    full = rank(observability_matrix(pair)) == 2 * Si.n
    return Verdict(KIND_AUTONOMOUS, (Si.id, Sj.id), full)


def witness_construct(pair: AugmentedPair, gamma: tuple[int, ...], x0_kernel,
                      sigma: int) -> Witness:
    """Build the equal-output certificate from a kernel vector of the
    sensor-restricted observability stack.

    The attacked-output values are read off the unrestricted stack: the
    response v = O x0 is supported only on the deleted sensor rows, and
    splitting gamma between the two runs (lowest indices to mode i)
    cancels it exactly.
    """
    gamma = tuple(sorted(set(gamma)))
    if len(gamma) > 2 * sigma:
        raise ValueError(f"support {gamma} exceeds the combined budget 2*sigma={2 * sigma}")
    x0 = x0_kernel if isinstance(x0_kernel, Matrix) else Matrix.column(x0_kernel, pair.C.backend)
    if x0.is_zero():
        raise ValueError("witness requires a nonzero kernel vector")
    residual = _restricted_observability(pair, gamma) @ x0
    if x0.backend == EXACT:
        in_kernel = residual.is_zero()
    else:
        in_kernel = residual.max_abs() <= 1e-9 * max(1.0, float(x0.max_abs()))
    if not in_kernel:
        raise ValueError("x0 is not in the kernel of the restricted observability stack")
    v = (observability_matrix(pair) @ x0).column_vector()
    split = min(sigma, len(gamma))
    gamma_i, gamma_j = gamma[:split], gamma[split:]
    p = pair.p
    zero = Fraction(0) if pair.C.backend == EXACT else 0.0
    wi, wj = [], []
    for t in range(pair.tau):
        wi_t = [zero] * p
        wj_t = [zero] * p
        for s in gamma_i:
            wi_t[s - 1] = -v[t * p + s - 1]
        for s in gamma_j:
            wj_t[s - 1] = v[t * p + s - 1]
        wi.append(tuple(wi_t))
        wj.append(tuple(wj_t))
    return Witness(x0.column_vector(), gamma_i, gamma_j, tuple(wi), tuple(wj))


def sigma_secure_autonomous(Si: LinearMode, Sj: LinearMode, sigma: int,
                            exhaustive: bool = False) -> Verdict:
    """Autonomous distinguishability robust to cyclic sigma-sparse sensor attacks
    on both runs.

    Every admissible combined support gamma (|gamma| <= 2*sigma) must
    leave the sensor-restricted joint observability stack at full column
    rank 2n.  By default only maximal supports are enumerated (deleting
    fewer rows cannot lower the rank); on failure the first deficient
    support is reported together with a constructed equal-output witness.
    """
    p, n = Si.p, Si.n
    _check_sensor_budget(sigma, p)
    pair = build_augmented(Si, Sj)
    if exhaustive:
        sizes = range(0, 2 * sigma + 1)
    else:
        sizes = [min(2 * sigma, p - 1)]
    ranks = []
    failing = None
    for size in sizes:
        for gamma in combinations(range(1, p + 1), size):
            stack = _restricted_observability(pair, gamma)
            r = rank(stack)
            ranks.append((gamma, r))
            if r < 2 * n and failing is None:
                failing = (gamma, stack)
    if failing is None:
        return Verdict(KIND_SIGMA_SECURE, (Si.id, Sj.id), True,
                       checked_patterns=len(ranks), gamma_ranks=tuple(ranks))
    gamma, stack = failing
    x0 = Matrix.column(kernel(stack).basis.col(0), pair.C.backend)
    witness = witness_construct(pair, gamma, x0, sigma)
    return Verdict(KIND_SIGMA_SECURE, (Si.id, Sj.id), False,
                   failing_pattern=AttackPattern(gamma=gamma),
                   witness=witness,
                   checked_patterns=len(ranks), gamma_ranks=tuple(ranks))


def _controlled_patterns(p: int, m: int, sigma: int, rho: int, exhaustive: bool):
    if exhaustive:
        gammas = [g for size in range(0, 2 * sigma + 1)
                  for g in combinations(range(1, p + 1), size)]
        deltas = [d for size in range(0, rho + 1)
                  for d in combinations(range(1, m + 1), size)]
    else:
        gammas = list(combinations(range(1, p + 1), min(2 * sigma, p - 1)))
        if rho == 0:
            deltas = [()]
        else:
            # Frontier sets: the empty support (hardest universal quantifier on
            # the attacked run) and every maximal-cardinality support (largest
            # authority for the explaining run).
            deltas = [()] + list(combinations(range(1, m + 1), rho))
    for g in gammas:
        for di in deltas:
            for dj in deltas:
                yield g, di, dj


def sigma_rho_secure_controlled(Si: LinearMode, Sj: LinearMode, sigma: int, rho: int,
                                exhaustive: bool = False) -> Verdict:
    """Controlled-pair distinguishability for generic inputs, robust to
    sigma-sparse sensor and rho-sparse actuator attacks.

    For each admissible tuple (gamma, delta_i, delta_j) the maximal
    controlled-invariant subspace W inside the retained output kernel is
    computed; the pair fails if either mode's honest-plus-attacked input
    directions fall inside W plus the other mode's attack authority.
    """
    p, m = Si.p, Si.m
    _check_sensor_budget(sigma, p)
    if not 0 <= rho <= m:
        raise BudgetError(f"rho must satisfy 0 <= rho <= m, got rho={rho}, m={m}")
    pairs_cache: dict[tuple, tuple[AugmentedPair, object, object, object]] = {}
    checked = 0
    for gamma, di, dj in _controlled_patterns(p, m, sigma, rho, exhaustive):
        key = (di, dj)
        if key not in pairs_cache:
            pair = build_augmented(Si, Sj, di, dj)
            pairs_cache[key] = (pair, image(pair.B), image(pair.Bhat_i), image(pair.Bhat_j))
        pair, im_b, im_i, im_j = pairs_cache[key]
        W = pair_invariant(pair, gamma).W
        checked += 1
        fails_i = W.sum(im_j).includes(im_b.sum(im_i))
        fails_j = W.sum(im_i).includes(im_b.sum(im_j))
        if fails_i or fails_j:
            return Verdict(
                KIND_SIGMA_RHO_SECURE, (Si.id, Sj.id), False,
                failing_pattern=AttackPattern(gamma=gamma, delta_i=di, delta_j=dj),
                checked_patterns=checked)
    return Verdict(KIND_SIGMA_RHO_SECURE, (Si.id, Sj.id), True, checked_patterns=checked)


@dataclass(frozen=True)
class DistinguishabilityReport:
    """All pairwise verdicts plus the mode-reconstructability flag."""

    sigma: int
    rho: int
    autonomous: bool
    exhaustive: bool
    verdicts: tuple[Verdict, ...]
    reconstructable: bool

    def for_pair(self, i, j) -> tuple[Verdict, ...]:
        key = (str(i), str(j))
        return tuple(v for v in self.verdicts
                     if (str(v.pair[0]), str(v.pair[1])) == key)


def pairwise_report(sys: SwitchingSystem, sigma: int | None = None,
                    rho: int | None = None, autonomous: bool | None = None,
                    exhaustive: bool = False) -> DistinguishabilityReport:
    """Run every applicable decider on every unordered mode pair.

    The initial mode is reconstructable from corrupted data exactly when
    every pair is securely distinguishable at the requested budgets; the
    governing verdict is the sigma/rho-secure one for controlled systems
    and the sigma-secure autonomous one when ``autonomous`` is set (or
    the system has no inputs).
    """
    if len(sys.modes) < 2:
        raise ValueError("pairwise analysis needs at least two modes")
    sigma = sys.sigma if sigma is None else sigma
    rho = sys.rho if rho is None else rho
    if autonomous is None:
        autonomous = sys.m == 0
    verdicts: list[Verdict] = []
    governing: list[bool] = []
    for Si, Sj in sys.pairs():
        if not autonomous:
            verdicts.append(input_generic_distinguishable(Si, Sj))
        verdicts.append(autonomous_distinguishable(Si, Sj))
        secure_auto = sigma_secure_autonomous(Si, Sj, sigma, exhaustive)
        verdicts.append(secure_auto)
        if autonomous:
            governing.append(secure_auto.result)
            continue
        secure_ctrl = sigma_rho_secure_controlled(Si, Sj, sigma, rho, exhaustive)
        verdicts.append(secure_ctrl)
        governing.append(secure_ctrl.result)
    return DistinguishabilityReport(
        sigma=sigma, rho=rho, autonomous=autonomous, exhaustive=exhaustive,
        verdicts=tuple(verdicts), reconstructable=all(governing))
