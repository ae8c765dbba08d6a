"""Matrices over exact rationals or float64, and the subspace lattice.

Every decision procedure in this package reduces to rank, kernel and
inclusion questions.  On the ``exact`` backend these are answered with
Fraction arithmetic and zero tolerance, so a verdict can never be flipped
by round-off.  The ``float`` backend mirrors the same API with numpy and
an SVD-based numerical rank for large simulations.

Index sets passed to :func:`restrict_rows` / :func:`restrict_cols` are
1-based, matching the sensor/actuator numbering used everywhere else in
this package.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

EXACT = "exact"
FLOAT = "float"

Scalar = Union[Fraction, float]


class DimensionMismatch(ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


def as_scalar(value, backend: str) -> Scalar:
    """Coerce ``value`` (number, Fraction or string like ``"-1/2"``) to the backend scalar."""
    if isinstance(value, str):
        value = Fraction(value.replace("−", "-").strip())
    if backend == EXACT:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, np.integer)):
            return Fraction(int(value))
        if isinstance(value, (float, np.floating)):
            return Fraction(float(value))
        raise TypeError(f"cannot coerce {value!r} to an exact rational")
    if backend == FLOAT:
        return float(value)
    raise ValueError(f"unknown backend {backend!r}")


class Matrix:
    """Immutable rows x cols matrix with a uniform scalar backend."""

    __slots__ = ("rows", "cols", "backend", "_entries")

    def __init__(self, entries: Iterable[Iterable], backend: str = EXACT, *, shape=None):
        grid = tuple(tuple(as_scalar(x, backend) for x in row) for row in entries)
        if grid:
            rows = len(grid)
            cols = len(grid[0])
            if any(len(r) != cols for r in grid):
                raise DimensionMismatch("ragged rows in matrix literal")
            if shape is not None and shape != (rows, cols):
                raise DimensionMismatch(f"shape {shape} does not match entries {rows}x{cols}")
        else:
            if shape is None:
                rows, cols = 0, 0
            else:
                rows, cols = shape
            if rows != 0 and cols != 0:
                raise DimensionMismatch("empty entry grid needs a degenerate shape")
            grid = tuple(() for _ in range(rows))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "backend", backend)
        object.__setattr__(self, "_entries", grid)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int, backend: str = EXACT) -> "Matrix":
        zero = Fraction(0) if backend == EXACT else 0.0
        return cls([[zero] * cols for _ in range(rows)], backend, shape=(rows, cols))

    @classmethod
    def identity(cls, n: int, backend: str = EXACT) -> "Matrix":
        one = Fraction(1) if backend == EXACT else 1.0
        zero = Fraction(0) if backend == EXACT else 0.0
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], backend)

    @classmethod
    def column(cls, vec: Sequence, backend: str = EXACT) -> "Matrix":
        return cls([[x] for x in vec], backend, shape=(len(tuple(vec)), 1))

    @classmethod
    def from_numpy(cls, arr: np.ndarray) -> "Matrix":
        arr = np.atleast_2d(np.asarray(arr, dtype=float))
        return cls(arr.tolist(), FLOAT, shape=arr.shape)

    # -- access -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key) -> Scalar:
        i, j = key
        return self._entries[i][j]

    def row(self, i: int) -> tuple:
        return self._entries[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._entries)

    def rowlist(self) -> list[list[Scalar]]:
        return [list(r) for r in self._entries]

    def column_vector(self) -> tuple:
        if self.cols != 1:
            raise DimensionMismatch("not a column vector")
        return tuple(r[0] for r in self._entries)

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._entries], dtype=float).reshape(self.shape)

    def to_backend(self, backend: str) -> "Matrix":
        if backend == self.backend:
            return self
        return Matrix(self._entries, backend, shape=self.shape)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._entries for x in r)

    def max_abs(self):
        """Largest absolute entry (0 for empty matrices)."""
        return max((abs(x) for r in self._entries for x in r), default=0)

    # -- arithmetic ---------------------------------------------------

    def _check_same(self, other: "Matrix"):
        if self.backend != other.backend:
            raise DimensionMismatch("mixed scalar backends")
        if self.shape != other.shape:
            raise DimensionMismatch(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)],
            self.backend, shape=self.shape)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        return Matrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)],
            self.backend, shape=self.shape)

    def __neg__(self) -> "Matrix":
        return Matrix([[-x for x in r] for r in self._entries], self.backend, shape=self.shape)

    def scale(self, c) -> "Matrix":
        c = as_scalar(c, self.backend)
        return Matrix([[c * x for x in r] for r in self._entries], self.backend, shape=self.shape)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.backend != other.backend:
            raise DimensionMismatch("mixed scalar backends")
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols_of_other = [other.col(j) for j in range(other.cols)]
        out = [[sum(a * b for a, b in zip(row, colv)) for colv in cols_of_other]
               for row in self._entries]
        return Matrix(out, self.backend, shape=(self.rows, other.cols))

    def transpose(self) -> "Matrix":
        return Matrix(
            [[self._entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
            self.backend, shape=(self.cols, self.rows))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.backend == other.backend and self.shape == other.shape
                and self._entries == other._entries)

    def __hash__(self):
        return hash((self.backend, self.shape, self._entries))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self._entries)
        return f"Matrix({self.rows}x{self.cols} {self.backend}: [{body}])"


def hstack(*mats: Matrix) -> Matrix:
    mats = [m for m in mats if m is not None]
    if not mats:
        raise ValueError("hstack of nothing")
    rows = mats[0].rows
    backend = mats[0].backend
    for m in mats:
        if m.rows != rows or m.backend != backend:
            raise DimensionMismatch("hstack operands disagree")
    cols = sum(m.cols for m in mats)
    grid = [sum((list(m.row(i)) for m in mats), []) for i in range(rows)]
    return Matrix(grid, backend, shape=(rows, cols))


def vstack(*mats: Matrix) -> Matrix:
    mats = [m for m in mats if m is not None]
    if not mats:
        raise ValueError("vstack of nothing")
    cols = mats[0].cols
    backend = mats[0].backend
    for m in mats:
        if m.cols != cols or m.backend != backend:
            raise DimensionMismatch("vstack operands disagree")
    rows = sum(m.rows for m in mats)
    grid = [list(r) for m in mats for r in m._entries]
    return Matrix(grid, backend, shape=(rows, cols))


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    if a.backend != b.backend:
        raise DimensionMismatch("mixed scalar backends")
    top = hstack(a, Matrix.zeros(a.rows, b.cols, a.backend))
    bot = hstack(Matrix.zeros(b.rows, a.cols, a.backend), b)
    return vstack(top, bot)


# -- elimination core (exact backend) ---------------------------------


def _rref(grid: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """In-place reduced row echelon form; returns (grid, pivot column indices)."""
    n_rows = len(grid)
    n_cols = len(grid[0]) if n_rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        pivot_row = None
        for i in range(r, n_rows):
            if grid[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        grid[r], grid[pivot_row] = grid[pivot_row], grid[r]
        inv = 1 / grid[r][c]
        grid[r] = [x * inv for x in grid[r]]
        for i in range(n_rows):
            if i != r and grid[i][c] != 0:
                f = grid[i][c]
                grid[i] = [x - f * y for x, y in zip(grid[i], grid[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return grid, pivots


def _float_svd_rank(arr: np.ndarray, tol: float | None) -> int:
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    if s.size == 0:
        return 0
    if tol is None:
        tol = max(arr.shape) * np.finfo(float).eps * s[0]
    return int(np.sum(s > tol))


def rank(M: Matrix, tol: float | None = None) -> int:
    """Dimension of the column space.

    Exact backend: Gaussian elimination over the rationals, no tolerance.
    Float backend: singular values above ``tol`` (default
    ``max(rows, cols) * sigma_max * eps``).
    """
    if M.rows == 0 or M.cols == 0:
        return 0
    if M.backend == EXACT:
        _, pivots = _rref(M.rowlist())
        return len(pivots)
    return _float_svd_rank(M.to_numpy(), tol)


def restrict_rows(M: Matrix, gamma: Iterable[int]) -> Matrix:
    """Delete the rows whose 1-based index lies in ``gamma``, preserving order."""
    drop = set(gamma)
    for g in drop:
        if not 1 <= g <= M.rows:
            raise IndexError(f"row index {g} out of range 1..{M.rows}")
    keep = [i for i in range(M.rows) if i + 1 not in drop]
    return Matrix([M.row(i) for i in keep], M.backend, shape=(len(keep), M.cols))


def restrict_cols(M: Matrix, pi: Iterable[int], keep: bool) -> Matrix:
    """Keep (``keep=True``) or delete (``keep=False``) the 1-based columns in ``pi``."""
    chosen = set(pi)
    for g in chosen:
        if not 1 <= g <= M.cols:
            raise IndexError(f"column index {g} out of range 1..{M.cols}")
    if keep:
        idx = [j for j in range(M.cols) if j + 1 in chosen]
    else:
        idx = [j for j in range(M.cols) if j + 1 not in chosen]
    return Matrix([[M.row(i)[j] for j in idx] for i in range(M.rows)],
                  M.backend, shape=(M.rows, len(idx)))


# -- subspaces ---------------------------------------------------------


class Subspace:
    """A linear subspace of R^d, stored as an independent basis matrix.

    The zero subspace has a basis with zero columns.  Exact bases are kept
    in reduced column echelon form, so equal subspaces have equal bases;
    float bases are orthonormal and equality falls back on mutual
    inclusion.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, basis: Matrix, *, _canonical: bool = False):
        if not _canonical:
            basis = _canonical_basis(basis)
        object.__setattr__(self, "ambient_dim", basis.rows)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def zero(cls, ambient_dim: int, backend: str = EXACT) -> "Subspace":
        return cls(Matrix.zeros(ambient_dim, 0, backend), _canonical=True)

    @classmethod
    def full(cls, ambient_dim: int, backend: str = EXACT) -> "Subspace":
        return cls(Matrix.identity(ambient_dim, backend), _canonical=True)

    @classmethod
    def span(cls, columns: Matrix) -> "Subspace":
        return cls(columns)

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def backend(self) -> str:
        return self.basis.backend

    def _check_ambient(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}")

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace(hstack(self.basis, other.basis))

    __add__ = sum

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.backend)
        # x in V & W  iff  x = Bv a = Bw b, i.e. [Bv | -Bw] (a;b) = 0.
        stacked = hstack(self.basis, -other.basis)
        coeffs = kernel(stacked)
        if coeffs.dim == 0:
            return Subspace.zero(self.ambient_dim, self.backend)
        top = Matrix([coeffs.basis.row(i) for i in range(self.dim)],
                     self.backend, shape=(self.dim, coeffs.dim))
        return Subspace(self.basis @ top)

    __and__ = intersect

    def includes(self, other: "Subspace", tol: float | None = None) -> bool:
        """True when ``other`` is contained in this subspace."""
        self._check_ambient(other)
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        return rank(hstack(self.basis, other.basis), tol) == self.dim

    def contains(self, vector: Sequence | Matrix, tol: float | None = None) -> bool:
        col = vector if isinstance(vector, Matrix) else Matrix.column(vector, self.backend)
        if col.is_zero():
            return True
        return self.includes(Subspace.span(col), tol)

    def __le__(self, other: "Subspace") -> bool:
        return other.includes(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.dim == other.dim
                and self.includes(other))

    def __hash__(self):
        return hash((self.ambient_dim, self.dim))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim} of R^{self.ambient_dim}, {self.backend})"


def _canonical_basis(columns: Matrix) -> Matrix:
    """Reduce spanning columns to a canonical independent basis."""
    if columns.cols == 0 or columns.rows == 0 or columns.is_zero():
        return Matrix.zeros(columns.rows, 0, columns.backend)
    if columns.backend == EXACT:
        grid, pivots = _rref(columns.transpose().rowlist())
        rows = [grid[i] for i in range(len(pivots))]
        return Matrix(rows, EXACT, shape=(len(pivots), columns.rows)).transpose()
    arr = columns.to_numpy()
    u, s, _ = np.linalg.svd(arr, full_matrices=False)
    r = _float_svd_rank(arr, None)
    return Matrix.from_numpy(u[:, :r]) if r else Matrix.zeros(columns.rows, 0, FLOAT)


def kernel(M: Matrix, tol: float | None = None) -> Subspace:
    """The nullspace {x : Mx = 0}; dimension cols - rank."""
    if M.cols == 0:
        return Subspace.zero(0, M.backend)
    if M.rows == 0:
        return Subspace.full(M.cols, M.backend)
    if M.backend == EXACT:
        grid, pivots = _rref(M.rowlist())
        pivot_set = set(pivots)
        free = [c for c in range(M.cols) if c not in pivot_set]
        if not free:
            return Subspace.zero(M.cols, EXACT)
        cols = []
        for fc in free:
            vec = [Fraction(0)] * M.cols
            vec[fc] = Fraction(1)
            for r, pc in enumerate(pivots):
                vec[pc] = -grid[r][fc]
            cols.append(vec)
        basis = Matrix(cols, EXACT).transpose()
        return Subspace(basis)
    arr = M.to_numpy()
    _, s, vh = np.linalg.svd(arr)
    if tol is None:
        tol = max(arr.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
    r = int(np.sum(s > tol)) if s.size else 0
    null = vh[r:].T
    if null.shape[1] == 0:
        return Subspace.zero(M.cols, FLOAT)
    return Subspace(Matrix.from_numpy(null), _canonical=True)


def image(M: Matrix, tol: float | None = None) -> Subspace:
    """The column space of M with an independent basis."""
    if M.cols == 0:
        return Subspace.zero(M.rows, M.backend)
    if M.backend == FLOAT:
        arr = M.to_numpy()
        r = _float_svd_rank(arr, tol)
        if r == 0:
            return Subspace.zero(M.rows, FLOAT)
        u, _, _ = np.linalg.svd(arr, full_matrices=False)
        return Subspace(Matrix.from_numpy(u[:, :r]), _canonical=True)
    return Subspace.span(M)


def subspace_sum(V: Subspace, W: Subspace) -> Subspace:
    return V.sum(W)


def intersect(V: Subspace, W: Subspace) -> Subspace:
    return V.intersect(W)


def includes(V: Subspace, W: Subspace, tol: float | None = None) -> bool:
    return V.includes(W, tol)


def preimage(A: Matrix, V: Subspace) -> Subspace:
    """{x : Ax in V} for a map A whose row count matches V's ambient dimension."""
    if A.rows != V.ambient_dim:
        raise DimensionMismatch(
            f"map has {A.rows} output rows but subspace lives in R^{V.ambient_dim}")
    if V.dim == V.ambient_dim:
        return Subspace.full(A.cols, A.backend)
    # Rows annihilating V: kernel of basis^T.  Then Ax in V  iff  (Ann A) x = 0.
    ann = kernel(V.basis.transpose()).basis.transpose()
    return kernel(ann @ A)


def solve_exact(A: Matrix, b: Matrix) -> Matrix | None:
    """A particular exact solution of Ax = b, or None when inconsistent."""
    if A.backend != EXACT or b.backend != EXACT:
        raise ValueError("solve_exact requires the exact backend")
    if b.cols != 1 or b.rows != A.rows:
        raise DimensionMismatch("right-hand side must be a matching column")
    if A.cols == 0:
        return Matrix.zeros(0, 1) if b.is_zero() else None
    grid, pivots = _rref([list(r) + [bv] for r, bv in zip(A.rowlist(), b.column_vector())])
    for r, row in enumerate(grid):
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    x = [Fraction(0)] * A.cols
    for r, pc in enumerate(pivots):
        if pc < A.cols:
            x[pc] = grid[r][A.cols]
        elif grid[r][A.cols] != 0:
            return None
    return Matrix.column(x)
