"""Exact dense linear algebra over a prime field F_p.

Matrices are numpy ``int64`` arrays with entries reduced into ``[0, p)``.
Zero-row and zero-column shapes are legal everywhere and behave as zero
maps.  Every routine is deterministic: elimination always takes the
leftmost available pivot, so any basis produced here is canonical for its
input.  With the default prime 32003 all products fit comfortably in
int64, hence no overflow handling is needed anywhere downstream.
"""

from __future__ import annotations

import numpy as np

DEFAULT_PRIME = 32003


class NoSolution(Exception):
    """Raised by :func:`solve` when the right-hand side is not in the image."""


def normalize(a, p: int) -> np.ndarray:
    """Coerce ``a`` to an int64 array with entries reduced mod p."""
    m = np.asarray(a, dtype=np.int64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return np.mod(m, p)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return (a @ b) % p


def inv_mod(x: int, p: int) -> int:
    return pow(int(x) % p, -1, p)


def rref(a, p: int):
    """Reduced row-echelon form.

    Returns ``(R, rank, pivots)`` where ``pivots`` lists the pivot column
    indices in increasing order.  Pivot choice is leftmost-first, making
    the result unique.
    """
    m = normalize(a, p).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = (m[r] * inv_mod(m[r, c], p)) % p
        other = np.nonzero(m[:, c])[0]
        for j in other:
            if j != r:
                m[j] = (m[j] - m[j, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, len(pivots), pivots


def rank(a, p: int) -> int:
    return rref(a, p)[1]


def row_space_basis(a, p: int) -> np.ndarray:
    """Rows of the rref with zero rows dropped; canonical basis of the row space."""
    r, rk, _ = rref(a, p)
    return r[:rk]


def residual(v, r: np.ndarray, pivots, p: int) -> np.ndarray:
    """Reduce row vector(s) ``v`` modulo an rref'd row space ``(r, pivots)``."""
    w = normalize(v, p).copy()
    for i, c in enumerate(pivots):
        coef = w[:, c].copy()
        nz = np.nonzero(coef)[0]
        if nz.size:
            w[nz] = (w[nz] - coef[nz, None] * r[i][None, :]) % p
    return w


def in_row_space(v, r: np.ndarray, pivots, p: int) -> bool:
    return not residual(v, r, pivots, p).any()


def kernel_basis(a, p: int) -> np.ndarray:
    """Columns form a canonical basis of the null space of ``a``."""
    m = normalize(a, p)
    rows, cols = m.shape
    r, rk, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in pivots]
    k = zeros(cols, len(free))
    for idx, f in enumerate(free):
        k[f, idx] = 1
        for i, c in enumerate(pivots):
            k[c, idx] = (-r[i, f]) % p
    return k


def solve(a, b, p: int) -> np.ndarray:
    """A particular solution of ``a @ x = b`` (free variables set to zero).

    Raises :class:`NoSolution` when some column of ``b`` is outside the
    image of ``a``.
    """
    m = normalize(a, p)
    rhs = normalize(b, p)
    if rhs.shape[0] != m.shape[0]:
        raise ValueError(f"shape mismatch solve({m.shape}, {rhs.shape})")
    rows, cols = m.shape
    aug = np.concatenate([m, rhs], axis=1)
    r, rk, pivots = rref(aug, p)
    if any(c >= cols for c in pivots):
        raise NoSolution("right-hand side is not in the image")
    x = zeros(cols, rhs.shape[1])
    for i, c in enumerate(pivots):
        x[c] = r[i, cols:]
    return x


def inverse(a, p: int) -> np.ndarray:
    m = normalize(a, p)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ValueError("only square matrices are invertible")
    x = solve(m, identity(n), p)
    if not np.array_equal(matmul(m, x, p), identity(n)):
        raise NoSolution("matrix is singular")
    return x


def is_invertible(a, p: int) -> bool:
    m = normalize(a, p)
    return m.shape[0] == m.shape[1] and rank(m, p) == m.shape[0]


class RowSpace:
    """Growable subspace of F_p^n kept in rref; supports membership tests."""

    def __init__(self, n: int, p: int):
        self.n = n
        self.p = p
        self.mat = zeros(0, n)
        self.pivots: list[int] = []

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def contains(self, v) -> bool:
        if self.n == 0:
            return True
        return in_row_space(normalize(v, self.p), self.mat, self.pivots, self.p)

    def add(self, v) -> bool:
        """Insert vector(s); returns True if the span grew."""
        if self.n == 0:
            return False
        w = normalize(v, self.p)
        stacked = np.concatenate([self.mat, w], axis=0)
        r, rk, piv = rref(stacked, self.p)
        grew = rk > self.dim
        self.mat = r[:rk]
        self.pivots = piv
        return grew

    def basis(self) -> np.ndarray:
        return self.mat.copy()
