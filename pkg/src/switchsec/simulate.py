"""Trace generation for corrupted modes, and cyclic-sparse attack synthesis.

The simulator is the empirical oracle behind every verdict: it runs the
exact recursion ``x(t+1) = A x(t) + B (u(t) + v(t))``,
``y(t) = C x(t) + w(t)`` so that equality assertions on the rational
backend are meaningful bit-for-bit.  Attack sequences have a fixed
support over the whole horizon (cyclic sparsity) and unconstrained,
possibly huge, values.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .exactla import EXACT, DimensionMismatch, Matrix
from .model import AugmentedPair, LinearMode

_SEED_DENOM = 1000  # attack values are multiples of 1/1000 on the exact backend


@dataclass(frozen=True)
class AttackSpec:
    """Realized cyclic-sparse attack sequences for one simulation run."""

    sensor_support: tuple[int, ...]
    actuator_support: tuple[int, ...]
    magnitude: object
    seed: int | None
    w: tuple[tuple, ...]  # tau x p sensor attack values
    v: tuple[tuple, ...]  # tau x m actuator attack values

    @classmethod
    def none(cls, p: int, m: int, tau: int, backend: str = EXACT) -> "AttackSpec":
        zero = Fraction(0) if backend == EXACT else 0.0
        return cls((), (), 0, None,
                   tuple(tuple([zero] * p) for _ in range(tau)),
                   tuple(tuple([zero] * m) for _ in range(tau)))


def gen_attack(p: int, m: int, sigma: int, rho: int, tau: int, *,
               magnitude=1000, seed: int = 0, backend: str = EXACT) -> AttackSpec:
    """Draw random supports of exact sizes sigma/rho and per-sample values
    uniform in [-magnitude, magnitude], deterministically from ``seed``."""
    if sigma and not 0 <= sigma < p:
        raise ValueError(f"sigma must satisfy 0 <= sigma < p, got sigma={sigma}, p={p}")
    if not 0 <= rho <= m:
        raise ValueError(f"rho must satisfy 0 <= rho <= m, got rho={rho}, m={m}")
    rng = random.Random(seed)
    sensors = tuple(sorted(rng.sample(range(1, p + 1), sigma))) if sigma else ()
    actuators = tuple(sorted(rng.sample(range(1, m + 1), rho))) if rho else ()
    span = int(Fraction(magnitude) * _SEED_DENOM)

    def draw():
        if backend == EXACT:
            return Fraction(rng.randint(-span, span), _SEED_DENOM)
        return rng.uniform(-float(magnitude), float(magnitude))

    zero = Fraction(0) if backend == EXACT else 0.0
    w, v = [], []
    for _ in range(tau):
        w_t = [zero] * p
        for s in sensors:
            w_t[s - 1] = draw()
        v_t = [zero] * m
        for a in actuators:
            v_t[a - 1] = draw()
        w.append(tuple(w_t))
        v.append(tuple(v_t))
    return AttackSpec(sensors, actuators, magnitude, seed, tuple(w), tuple(v))


@dataclass(frozen=True)
class Trace:
    """One simulated run: states, inputs, corrupted outputs, applied attacks."""

    mode: object
    x: tuple[tuple, ...]  # tau+1 state vectors
    u: tuple[tuple, ...]  # tau input vectors
    y: tuple[tuple, ...]  # tau corrupted outputs
    w: tuple[tuple, ...]
    v: tuple[tuple, ...]

    def stacked_y(self) -> tuple:
        return tuple(val for row in self.y for val in row)


def simulate(mode: LinearMode, x0, u=None, attack: AttackSpec | None = None,
             tau: int = 1) -> Trace:
    """Run the corrupted recursion for ``tau`` samples.

    ``u`` is a sequence of tau input vectors (None means autonomous /
    zero input); the attack defaults to no attack.
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    backend = mode.backend
    zero = Fraction(0) if backend == EXACT else 0.0
    if attack is None:
        attack = AttackSpec.none(mode.p, mode.m, tau, backend)
    if len(attack.w) < tau or len(attack.v) < tau:
        raise DimensionMismatch("attack sequences shorter than the horizon")
    if u is None:
        u = [[zero] * mode.m for _ in range(tau)]
    u = [tuple(row) for row in u]
    if len(u) != tau or any(len(row) != mode.m for row in u):
        raise DimensionMismatch(f"input must be {tau} vectors of length {mode.m}")
    x = Matrix.column(x0, backend)
    if x.rows != mode.n:
        raise DimensionMismatch(f"x0 must have length {mode.n}")
    xs, ys = [x.column_vector()], []
    for t in range(tau):
        w_t = attack.w[t][:mode.p]
        v_t = attack.v[t][:mode.m]
        y = (mode.C @ x).column_vector()
        ys.append(tuple(a + b for a, b in zip(y, w_t)))
        drive = Matrix.column([a + b for a, b in zip(u[t], v_t)], backend) \
            if mode.m else Matrix.zeros(0, 1, backend)
        x = mode.A @ x + (mode.B @ drive if mode.m else Matrix.zeros(mode.n, 1, backend))
        xs.append(x.column_vector())
    return Trace(mode.id, tuple(xs), tuple(u), tuple(ys),
                 tuple(attack.w[:tau]), tuple(attack.v[:tau]))


def replay_witness(pair: AugmentedPair, witness) -> tuple[Trace, Trace]:
    """Simulate both modes of the pair under the witness attacks (autonomous runs).

    For a valid witness the two corrupted output sequences coincide
    entrywise on the rational backend.
    """
    n, p, m = pair.n, pair.p, pair.m
    tau = pair.tau
    backend = pair.C.backend
    x0i = witness.x0[:n]
    x0j = witness.x0[n:]
    zero_v = tuple(tuple([Fraction(0) if backend == EXACT else 0.0] * m) for _ in range(tau))
    atk_i = AttackSpec(witness.gamma_i, (), 0, None, witness.wi, zero_v)
    atk_j = AttackSpec(witness.gamma_j, (), 0, None, witness.wj, zero_v)
    trace_i = simulate(pair.mode_i, x0i, None, atk_i, tau)
    trace_j = simulate(pair.mode_j, x0j, None, atk_j, tau)
    return trace_i, trace_j


# -- trace export ------------------------------------------------------


def _vals_to_json(row):
    return [str(x) if isinstance(x, Fraction) else x for x in row]


def write_trace(trace: Trace, path) -> None:
    """Export a trace as JSON lines, one record per time step."""
    path = Path(path)
    with path.open("w") as fh:
        for t in range(len(trace.y)):
            record = {
                "t": t,
                "x": _vals_to_json(trace.x[t]),
                "u": _vals_to_json(trace.u[t]),
                "y": _vals_to_json(trace.y[t]),
                "w": _vals_to_json(trace.w[t]),
                "v": _vals_to_json(trace.v[t]),
            }
            fh.write(json.dumps(record) + "\n")


def read_trace(path) -> dict:
    """Read a JSON-lines trace back into per-step tuples keyed by field."""
    path = Path(path)
    records = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line, parse_float=Fraction))
    records.sort(key=lambda r: r["t"])

    def parse(row):
        return tuple(Fraction(x) if isinstance(x, (str, int)) else x for x in row)

    return {key: tuple(parse(rec[key]) for rec in records)
            for key in ("x", "u", "y", "w", "v")}
