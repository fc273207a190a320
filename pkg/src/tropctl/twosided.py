"""Generating sets for homogeneous two-sided systems ``D x = C x`` over Zmax.

The solver intersects one hyperplane at a time.  If ``Q`` generates the
solutions of the equations seen so far, the solutions of the next equation
``d x = c x`` are ``Q y`` for ``y`` in the hyperplane ``(dQ) y = (cQ) y``,
whose generators have at most two finite coordinates.  Redundant generators
are pruned after each equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, identity, left_residual, mat_mul
from .semiring import NEG_INF

# Cells per residual slab when testing redundancy.
_CHUNK = 1 << 22


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """Columns of ``matrix`` generate a subsemimodule of Zmax^dim."""

    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.ndim != 2:
            raise ValueError("generator matrix must be 2-d")
        if np.isposinf(self.matrix).any():
            raise ValueError("generators of a Zmax semimodule cannot contain +inf")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __len__(self) -> int:
        return self.matrix.shape[1]

    @property
    def columns(self) -> list[np.ndarray]:
        return [self.matrix[:, j] for j in range(self.matrix.shape[1])]

    @classmethod
    def empty(cls, dim: int) -> "GeneratorSet":
        return cls(np.full((dim, 0), NEG_INF))


@dataclass(frozen=True, eq=False)
class TwoSidedSystem:
    D: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        D = as_matrix(self.D, allow_pos_inf=False)
        C = as_matrix(self.C, allow_pos_inf=False)
        if D.shape != C.shape:
            raise ValueError(f"D and C must have equal shapes, got {D.shape} and {C.shape}")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "C", C)

    @property
    def unknowns(self) -> int:
        return self.D.shape[1]


def _normalize(G: np.ndarray) -> np.ndarray:
    """Drop zero columns and shift each remaining column so its maximum is 0."""
    top = G.max(axis=0) if G.shape[1] else np.empty(0)
    keep = top > NEG_INF
    G = G[:, keep]
    return G - top[keep]


def _redundant(G: np.ndarray) -> np.ndarray:
    """Mask of columns lying in the span of the other columns.

    Assumes the columns are normalized and pairwise distinct, in which case the
    surviving columns are exactly the extreme rays.
    """
    p = G.shape[1]
    out = np.zeros(p, dtype=bool)
    if p <= 1:
        return out
    step = max(1, _CHUNK // p)
    for lo in range(0, p, step):
        hi = min(p, lo + step)
        R = left_residual(G, G[:, lo:hi])
        R[np.arange(lo, hi), np.arange(hi - lo)] = NEG_INF
        out[lo:hi] = np.all(mat_mul(G, R) == G[:, lo:hi], axis=0)
    return out


def minimize_generators(G) -> GeneratorSet:
    """Canonical generating set with the same span.

    Columns are top-normalized, deduplicated, stripped of members of the span
    of the others, and sorted lexicographically.
    """
    M = G.matrix if isinstance(G, GeneratorSet) else as_matrix(G, allow_pos_inf=False)
    M = _normalize(M)
    if M.shape[1] == 0:
        return GeneratorSet(M)
    M = np.unique(M, axis=1)
    M = M[:, ~_redundant(M)]
    return GeneratorSet(np.ascontiguousarray(M))


def _hyperplane_columns(Q: np.ndarray, dq: np.ndarray, cq: np.ndarray) -> np.ndarray:
    """Columns ``Q ⊗ H`` where ``H`` generates ``{y : dq·y = cq·y}``."""
    equal = np.flatnonzero(dq == cq)
    left = np.flatnonzero((dq >= cq) & (dq > NEG_INF))
    right = np.flatnonzero((cq >= dq) & (cq > NEG_INF))
    ii, jj = np.meshgrid(left, right, indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    tied = dq == cq
    keep = (ii != jj) & ~(tied[ii] & tied[jj])
    ii, jj = ii[keep], jj[keep]
    shift = dq[ii] - cq[jj]
    paired = np.maximum(Q[:, ii], Q[:, jj] + shift)
    return np.hstack([Q[:, equal], paired])


def solve_hyperplane(a, b) -> GeneratorSet:
    """Generators of ``{x : a·x = b·x}`` for row vectors ``a``, ``b``.

    Unit vectors ``e_k`` where ``a_k = b_k``, and for every ``i ≠ j`` with
    ``a_i ≥ b_i`` and ``b_j ≥ a_j`` (``a_i``, ``b_j`` finite, not both ties)
    the vector with ``x_i = 0`` and ``x_j = a_i - b_j``.
    """
    a = as_vector(a, allow_pos_inf=False)
    b = as_vector(b, allow_pos_inf=False)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    return minimize_generators(_hyperplane_columns(identity(a.size), a, b))


def solve_system(system: TwoSidedSystem) -> GeneratorSet:
    """Generating set of ``{x : D x = C x}``, minimized and canonical."""
    D, C = system.D, system.C
    Q = identity(system.unknowns)
    pending = list(range(D.shape[0]))
    while pending and Q.shape[1]:
        DQ = mat_mul(D[pending], Q)
        CQ = mat_mul(C[pending], Q)
        # Next equation: the one whose hyperplane yields the fewest columns.
        growth = np.array([_growth(dq, cq) for dq, cq in zip(DQ, CQ)])
        open_ = np.flatnonzero(growth >= 0)
        if open_.size == 0:
            break
        k = int(open_[np.argmin(growth[open_])])
        Q = minimize_generators(_hyperplane_columns(Q, DQ[k], CQ[k])).matrix
        pending = [pending[i] for i in open_ if i != k]
    return minimize_generators(Q)


def _growth(dq: np.ndarray, cq: np.ndarray) -> int:
    """Upper bound on the columns produced by one hyperplane; -1 if it is already satisfied."""
    if np.array_equal(dq, cq):
        return -1
    tied = dq == cq
    left = int(((dq > cq) & (dq > NEG_INF)).sum())
    right = int(((cq > dq) & (cq > NEG_INF)).sum())
    t = int((tied & (dq > NEG_INF)).sum())
    return int(tied.sum()) + (left + t) * (right + t) - t * t


def fold_inequality(E) -> TwoSidedSystem:
    """``E x ≤ x`` rewritten as ``(E ⊕ I) x = I x``."""
    E = as_matrix(E, allow_pos_inf=False)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ValueError(f"fold_inequality needs a square matrix, got {E.shape}")
    I = identity(E.shape[0])
    return TwoSidedSystem(np.maximum(E, I), I)
