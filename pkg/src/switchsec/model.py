"""Switching-system data model and the stacked input/output maps.

A switching system is a finite family of discrete-time linear modes
``x(t+1) = A x(t) + B u(t)``, ``y(t) = C x(t)`` sharing dimensions
(n states, m inputs, p sensors), together with attack budgets: at most
``sigma`` sensors and ``rho`` actuators may be corrupted, with supports
fixed over time.  Pairwise analysis happens on the augmented pair, the
parallel interconnection whose output is the difference of the two mode
outputs.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .exactla import (
    EXACT,
    FLOAT,
    DimensionMismatch,
    Matrix,
    block_diag,
    hstack,
    restrict_cols,
    vstack,
)

class ModelError(ValueError):
    """A model file or system description failed validation."""


@dataclass(frozen=True)
class LinearMode:
    """One discrete mode (A, B, C); autonomous modes use m = 0 or B = 0."""

    id: object
    A: Matrix
    B: Matrix
    C: Matrix

    def __post_init__(self):
        if self.A.rows != self.A.cols:
            raise ModelError(f"mode {self.id}: A must be square, got {self.A.shape}")
        if self.B.rows != self.A.rows:
            raise ModelError(f"mode {self.id}: B has {self.B.rows} rows, expected {self.A.rows}")
        if self.C.cols != self.A.rows:
            raise ModelError(f"mode {self.id}: C has {self.C.cols} columns, expected {self.A.rows}")
        if self.C.rows < 1:
            raise ModelError(f"mode {self.id}: at least one sensor row required")
        backends = {self.A.backend, self.B.backend, self.C.backend}
        if len(backends) != 1:
            raise ModelError(f"mode {self.id}: mixed scalar backends {backends}")

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.B.cols

    @property
    def p(self) -> int:
        return self.C.rows

    @property
    def backend(self) -> str:
        return self.A.backend


@dataclass(frozen=True)
class SwitchingSystem:
    """A family of modes plus the attack budgets and minimum dwell time."""

    modes: tuple[LinearMode, ...]
    sigma: int = 0
    rho: int = 0
    dwell: int = 1
    name: str | None = None
    note: str | None = None

    def __post_init__(self):
        if not self.modes:
            raise ModelError("at least one mode required")
        object.__setattr__(self, "modes", tuple(self.modes))
        n, m, p = self.modes[0].n, self.modes[0].m, self.modes[0].p
        for mode in self.modes:
            if (mode.n, mode.m, mode.p) != (n, m, p):
                raise ModelError(
                    f"mode {mode.id}: dimensions {(mode.n, mode.m, mode.p)} differ "
                    f"from {(n, m, p)}")
        labels = [str(mode.id) for mode in self.modes]
        if len(set(labels)) != len(labels):
            raise ModelError("duplicate mode ids")
        if not 0 <= self.sigma < p:
            raise ModelError(f"sigma must satisfy 0 <= sigma < p, got sigma={self.sigma}, p={p}")
        if not 0 <= self.rho <= m:
            raise ModelError(f"rho must satisfy 0 <= rho <= m, got rho={self.rho}, m={m}")
        if self.dwell < 1:
            raise ModelError(f"dwell must be >= 1, got {self.dwell}")
        if self.dwell < 2 * n:
            warnings.warn(
                f"dwell time {self.dwell} is below the analysis horizon {2 * n}; "
                "pairwise verdicts assume the active mode persists for 2n steps",
                stacklevel=2)

    @property
    def n(self) -> int:
        return self.modes[0].n

    @property
    def m(self) -> int:
        return self.modes[0].m

    @property
    def p(self) -> int:
        return self.modes[0].p

    @property
    def backend(self) -> str:
        return self.modes[0].backend

    def mode(self, label) -> LinearMode:
        for mode in self.modes:
            if mode.id == label or str(mode.id) == str(label):
                return mode
        raise ModelError(f"no mode with id {label!r}")

    def pairs(self):
        for a in range(len(self.modes)):
            for b in range(a + 1, len(self.modes)):
                yield self.modes[a], self.modes[b]

    def to_backend(self, backend: str) -> "SwitchingSystem":
        if backend == self.backend:
            return self
        modes = tuple(
            LinearMode(m.id, m.A.to_backend(backend), m.B.to_backend(backend),
                       m.C.to_backend(backend))
            for m in self.modes)
        return SwitchingSystem(modes, self.sigma, self.rho, self.dwell, self.name, self.note)


@dataclass(frozen=True)
class AttackPattern:
    """Support sets under test: sensors Gamma (<= 2*sigma combined) and
    actuator sets Delta_i / Delta_j (<= rho each), all 1-based."""

    gamma: tuple[int, ...] = ()
    delta_i: tuple[int, ...] = ()
    delta_j: tuple[int, ...] = ()

    def __post_init__(self):
        for attr in ("gamma", "delta_i", "delta_j"):
            vals = tuple(sorted(set(getattr(self, attr))))
            object.__setattr__(self, attr, vals)


@dataclass(frozen=True)
class AugmentedPair:
    """Parallel interconnection of two modes whose output is y_i - y_j.

    ``Bhat_i``/``Bhat_j`` inject the actuator attacks: the retained B
    columns of each mode, zero-padded on the other mode's states.
    """

    i: object
    j: object
    A: Matrix
    B: Matrix
    C: Matrix
    Bhat_i: Matrix
    Bhat_j: Matrix
    tau: int
    mode_i: LinearMode
    mode_j: LinearMode
    delta_i: tuple[int, ...] = ()
    delta_j: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.mode_i.n

    @property
    def m(self) -> int:
        return self.mode_i.m

    @property
    def p(self) -> int:
        return self.mode_i.p


def build_augmented(Si: LinearMode, Sj: LinearMode,
                    delta_i: tuple[int, ...] = (),
                    delta_j: tuple[int, ...] = ()) -> AugmentedPair:
    """Assemble the augmented pair for modes Si, Sj with chosen actuator supports."""
    if (Si.n, Si.m, Si.p) != (Sj.n, Sj.m, Sj.p):
        raise DimensionMismatch(
            f"modes {Si.id} and {Sj.id} have different dimensions")
    delta_i = tuple(sorted(set(delta_i)))
    delta_j = tuple(sorted(set(delta_j)))
    for d in delta_i + delta_j:
        if not 1 <= d <= Si.m:
            raise IndexError(f"actuator index {d} out of range 1..{Si.m}")
    n = Si.n
    backend = Si.backend
    Bi_sel = restrict_cols(Si.B, delta_i, keep=True)
    Bj_sel = restrict_cols(Sj.B, delta_j, keep=True)
    return AugmentedPair(
        i=Si.id, j=Sj.id,
        A=block_diag(Si.A, Sj.A),
        B=vstack(Si.B, Sj.B),
        C=hstack(Si.C, -Sj.C),
        Bhat_i=vstack(Bi_sel, Matrix.zeros(n, len(delta_i), backend)),
        Bhat_j=vstack(Matrix.zeros(n, len(delta_j), backend), Bj_sel),
        tau=2 * n,
        mode_i=Si, mode_j=Sj,
        delta_i=delta_i, delta_j=delta_j)


def _observability_stack(C: Matrix, A: Matrix, steps: int) -> Matrix:
    blocks = []
    CA = C
    for _ in range(steps):
        blocks.append(CA)
        CA = CA @ A
    return vstack(*blocks)


def _markov_stack(C: Matrix, A: Matrix, B: Matrix, steps: int) -> Matrix:
    """Block lower-triangular Toeplitz map from stacked inputs to stacked outputs.

    Row block t carries ``C A^(t-1-k) B`` at column block k < t; the first
    block row is zero because inputs act with one step of delay.
    """
    p_, m_ = C.rows, B.cols
    if steps < 1:
        raise ValueError("steps must be >= 1")
    impulse = []  # impulse[k] = C A^k B
    CA = C
    for _ in range(steps - 1):
        impulse.append(CA @ B)
        CA = CA @ A
    zero = Matrix.zeros(p_, m_, C.backend)
    rows = []
    for t in range(steps):
        row = [impulse[t - 1 - k] if k <= t - 1 else zero for k in range(steps - 1)]
        if row:
            rows.append(hstack(*row))
        else:
            rows.append(Matrix.zeros(p_, 0, C.backend))
    return vstack(*rows)


def observability_matrix(pair: AugmentedPair, steps: int | None = None) -> Matrix:
    """Stacked [C; CA; ...; C A^(steps-1)] of the augmented pair (default 2n rows blocks)."""
    steps = pair.tau if steps is None else steps
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return _observability_stack(pair.C, pair.A, steps)


def markov_matrices(pair: AugmentedPair, steps: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Toeplitz maps (input, attack on mode i, attack on mode j) of the pair.

    Signs are arranged so that with the physical attack sequences D_i, D_j
    the output difference satisfies
    ``Y = O x0 + M_u U + M_i D_i - M_j D_j + W_i - W_j``: the pair's output
    matrix already negates mode j, so its attack map is returned with that
    sign absorbed (each map is then the mode's own impulse response through
    its attacked actuator columns).
    """
    steps = pair.tau if steps is None else steps
    return (
        _markov_stack(pair.C, pair.A, pair.B, steps),
        _markov_stack(pair.C, pair.A, pair.Bhat_i, steps),
        -_markov_stack(pair.C, pair.A, pair.Bhat_j, steps),
    )


def stacked_output_map(pair: AugmentedPair, tau: int) -> tuple[Matrix, Matrix, Matrix, Matrix]:
    """Matrices (O, M_u, M_i, M_j) such that over tau samples

    ``Y = O x0 + M_u U + M_i D_i - M_j D_j + W_i - W_j``

    where Y stacks the output difference, U the honest input and D/W the
    actuator/sensor attack sequences.
    """
    return (observability_matrix(pair, tau), *markov_matrices(pair, tau))


def mode_output_map(mode: LinearMode, tau: int,
                    delta: tuple[int, ...] = ()) -> tuple[Matrix, Matrix, Matrix]:
    """Single-mode stacked maps (O, T_u, T_d) with actuator columns ``delta``."""
    B_sel = restrict_cols(mode.B, delta, keep=True)
    return (
        _observability_stack(mode.C, mode.A, tau),
        _markov_stack(mode.C, mode.A, mode.B, tau),
        _markov_stack(mode.C, mode.A, B_sel, tau),
    )


def discretize(Ac: Matrix, Bc: Matrix, h, method: str = "euler") -> tuple[Matrix, Matrix]:
    """Discretize continuous dynamics (Ac, Bc) with step ``h``.

    ``euler`` keeps the backend (rational inputs stay rational):
    Ad = I + h Ac, Bd = h Bc.  ``zoh`` returns float matrices via the
    matrix exponential: Ad = exp(Ac h), Bd = (integral of exp) Bc.
    """
    if Ac.rows != Ac.cols:
        raise DimensionMismatch("Ac must be square")
    if Bc.rows != Ac.rows:
        raise DimensionMismatch("Bc row count must match Ac")
    h_frac = Fraction(str(h).replace("−", "-")) if isinstance(h, str) else Fraction(h)
    if h_frac <= 0:
        raise ValueError(f"step must be positive, got {h}")
    if method == "euler":
        hs = h_frac if Ac.backend == EXACT else float(h_frac)
        Ad = Matrix.identity(Ac.rows, Ac.backend) + Ac.scale(hs)
        return Ad, Bc.scale(hs)
    if method == "zoh":
        import numpy as np
        from scipy.linalg import expm

        n = Ac.rows
        # exp([[A, I], [0, 0]] h) = [[Ad, S], [0, I]] with S the input integral.
        block = np.zeros((2 * n, 2 * n))
        block[:n, :n] = Ac.to_numpy()
        block[:n, n:] = np.eye(n)
        e = expm(block * float(h_frac))
        Ad = Matrix.from_numpy(e[:n, :n])
        S = Matrix.from_numpy(e[:n, n:])
        return Ad, S @ Bc.to_backend(FLOAT)
    raise ValueError(f"unknown discretization method {method!r}")


# -- model file I/O ----------------------------------------------------


def _parse_matrix(raw, rows: int, cols: int, backend: str, where: str) -> Matrix:
    if not isinstance(raw, list) or len(raw) != rows:
        raise ModelError(f"{where}: expected {rows} rows, got "
                         f"{len(raw) if isinstance(raw, list) else type(raw).__name__}")
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != cols:
            raise ModelError(f"{where}: row {r + 1} must have {cols} entries")
    try:
        return Matrix(raw, backend, shape=(rows, cols))
    except (ValueError, TypeError) as exc:
        raise ModelError(f"{where}: {exc}") from exc


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ModelError(f"{where}: missing required field {key!r}")
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise ModelError(f"{where}: field {key!r} must be an integer")
    if not isinstance(value, kind):
        raise ModelError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def model_from_dict(data: dict, *, where: str = "model",
                    discretize_continuous: bool = True) -> SwitchingSystem:
    """Validate a parsed model dictionary and build the SwitchingSystem."""
    n = _require(data, "n", int, where)
    m = _require(data, "m", int, where)
    p = _require(data, "p", int, where)
    scalar = data.get("scalar", "rational")
    if scalar not in ("rational", "float"):
        raise ModelError(f"{where}: scalar must be 'rational' or 'float', got {scalar!r}")
    backend = EXACT if scalar == "rational" else FLOAT
    raw_modes = _require(data, "modes", list, where)
    if len(raw_modes) < 2:
        raise ModelError(f"{where}: at least two modes required")
    modes = []
    for k, raw in enumerate(raw_modes):
        mwhere = f"{where}.modes[{k}]"
        if not isinstance(raw, dict):
            raise ModelError(f"{mwhere}: each mode must be an object")
        label = raw.get("id", k + 1)
        A = _parse_matrix(_require(raw, "A", list, mwhere), n, n, backend, f"{mwhere}.A")
        B = _parse_matrix(_require(raw, "B", list, mwhere), n, m, backend, f"{mwhere}.B")
        C = _parse_matrix(_require(raw, "C", list, mwhere), p, n, backend, f"{mwhere}.C")
        if data.get("continuous_time", False) and discretize_continuous:
            h = data.get("h")
            if h is None:
                raise ModelError(f"{where}: continuous-time model needs a step 'h'")
            method = data.get("discretization", "euler")
            if method == "zoh" and backend == EXACT:
                raise ModelError(
                    f"{where}: zoh discretization produces float matrices; "
                    "set scalar to 'float' or use euler")
            A, B = discretize(A, B, h, method)
        modes.append(LinearMode(label, A, B, C))
    return SwitchingSystem(
        modes=tuple(modes),
        sigma=data.get("sigma", 0),
        rho=data.get("rho", 0),
        dwell=data.get("dwell", 1),
        name=data.get("name"),
        note=data.get("note"))


def load_model(path, *, discretize_continuous: bool = True) -> SwitchingSystem:
    """Load and validate a model JSON file.

    Schema (see docs/model.schema.json): an object with integer ``n``,
    ``m``, ``p``, budgets ``sigma``/``rho``, ``dwell``, ``scalar``
    ('rational' or 'float'), a ``modes`` array of ``{id, A, B, C}`` with
    matrices as row-major arrays of numbers or strings like "-1/2", and
    optional ``continuous_time``/``h``/``discretization`` for models that
    must be discretized on load.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ModelError(f"{path}: {exc}") from exc
    try:
        data = json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ModelError(f"{path}: top-level value must be an object")
    return model_from_dict(data, where=str(path), discretize_continuous=discretize_continuous)


def _scalar_to_json(x):
    if isinstance(x, Fraction):
        return str(x)
    return x


def system_to_dict(sys: SwitchingSystem) -> dict:
    """Serialize a (discrete-time) system back to the model file layout."""
    return {
        "n": sys.n, "m": sys.m, "p": sys.p,
        "sigma": sys.sigma, "rho": sys.rho, "dwell": sys.dwell,
        "scalar": "rational" if sys.backend == EXACT else "float",
        "continuous_time": False,
        **({"name": sys.name} if sys.name else {}),
        **({"note": sys.note} if sys.note else {}),
        "modes": [
            {
                "id": mode.id,
                "A": [[_scalar_to_json(x) for x in mode.A.row(i)] for i in range(sys.n)],
                "B": [[_scalar_to_json(x) for x in mode.B.row(i)] for i in range(sys.n)],
                "C": [[_scalar_to_json(x) for x in mode.C.row(i)] for i in range(sys.p)],
            }
            for mode in sys.modes
        ],
    }


def bundled_model_path(name: str = "boost") -> Path:
    """Filesystem path of a model shipped with the package."""
    return Path(resources.files("switchsec").joinpath("models", f"{name}.json"))


def load_bundled(name: str = "boost") -> SwitchingSystem:
    return load_model(bundled_model_path(name))
