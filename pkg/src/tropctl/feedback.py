"""Linear state feedback for algebraic (A,B)-invariance, and max-plus eigenvectors.

``Im Q`` is algebraically (A,B)-invariant iff ``(A t ⊕ B F) Q = Q G`` has a
solution with ``t`` finite.  The unknowns ``(t, F, G)`` are flattened into
one vector and the system is handed to the two-sided solver; a min-max
sub-fixed-point iteration offers a faster way to find a witness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .linalg import (
    as_matrix,
    is_irreducible,
    kleene_star,
    left_residual,
    mat_mul,
    spectral_radius,
    zeros,
)
from .semimodule import Semimodule, span_contains
from .semiring import NEG_INF
from .twosided import TwoSidedSystem, solve_system

log = logging.getLogger(__name__)

DEFAULT_FLOOR = -(10**6)
DEFAULT_ITERATION_BOUND = 10_000


@dataclass(frozen=True, eq=False)
class FeedbackResult:
    """``F``/``G`` are set when a feedback exists; ``method`` names the route that decided."""

    F: Optional[np.ndarray]
    G: Optional[np.ndarray]
    method: str

    @property
    def found(self) -> bool:
        return self.F is not None


@dataclass(frozen=True, eq=False)
class FeedbackLayout:
    """Positions of ``t``, ``F`` and ``G`` inside the flattened unknown vector."""

    q: int
    n: int
    r: int
    f_index: np.ndarray  # q x n, -1 where the entry is pinned to -inf
    g_offset: int

    @property
    def size(self) -> int:
        return self.g_offset + self.r * self.r

    def unpack(self, z: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        F = np.full((self.q, self.n), NEG_INF)
        mask = self.f_index >= 0
        F[mask] = z[self.f_index[mask]]
        G = z[self.g_offset :].reshape(self.r, self.r)
        return float(z[0]), F, G


def _conform(A, B, Q: np.ndarray):
    A = as_matrix(A, allow_pos_inf=False)
    B = as_matrix(B, allow_pos_inf=False)
    n = Q.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"A must be {n}x{n}, got {A.shape}")
    if B.shape[0] != n:
        raise ValueError(f"B must have {n} rows, got {B.shape}")
    return A, B


def feedback_system(
    A, B, Q, *, support=None, nonpositive: bool = False
) -> tuple[TwoSidedSystem, FeedbackLayout]:
    """Two-sided system equivalent to ``(A t ⊕ B F) Q = Q G``.

    ``support`` (boolean ``q x n``) pins the ``False`` entries of ``F`` to
    ``-inf``.  ``nonpositive`` adds ``F_kl ⊕ t = t``, i.e. ``F ≤ 0`` once ``t``
    is scaled to 0; this is what restricts feedback gains to natural numbers
    in the order-dual encoding of Nmin.
    """
    Q = as_matrix(Q, allow_pos_inf=False)
    A, B = _conform(A, B, Q)
    n, r = Q.shape
    q = B.shape[1]
    allowed = np.ones((q, n), dtype=bool) if support is None else np.asarray(support, dtype=bool)
    if allowed.shape != (q, n):
        raise ValueError(f"support must be {q}x{n}, got {allowed.shape}")
    f_index = np.full((q, n), -1)
    f_index[allowed] = 1 + np.arange(allowed.sum())
    layout = FeedbackLayout(q, n, r, f_index, 1 + int(allowed.sum()))

    AQ = mat_mul(A, Q)
    rows_d, rows_c = [], []
    for i in range(n):
        for j in range(r):
            d = np.full(layout.size, NEG_INF)
            c = np.full(layout.size, NEG_INF)
            d[0] = AQ[i, j]
            coef = B[i, :, None] + Q[None, :, j]  # coefficient of F[k, l]
            d[f_index[allowed]] = coef[allowed]
            c[layout.g_offset + np.arange(r) * r + j] = Q[i, :]
            rows_d.append(d)
            rows_c.append(c)
    if nonpositive:
        for k in f_index[allowed]:
            d = np.full(layout.size, NEG_INF)
            c = np.full(layout.size, NEG_INF)
            d[[0, k]] = 0.0
            c[0] = 0.0
            rows_d.append(d)
            rows_c.append(c)
    if not rows_d:
        empty = np.empty((0, layout.size))
        return TwoSidedSystem(empty, empty), layout
    return TwoSidedSystem(np.array(rows_d), np.array(rows_c)), layout


def minmax_subfixed(
    D, C, iteration_bound: int = DEFAULT_ITERATION_BOUND, floor: int = DEFAULT_FLOOR
) -> Optional[np.ndarray]:
    """Finite ``x`` with ``D x = C x`` via ``x ← x ∧ f(x)``, ``f(x) = (D\\Cx) ∧ (C\\Dx)``.

    Starts from the zero vector.  The iterates decrease and stay above the
    greatest finite solution below the start, so with enough iterations they
    reach it exactly; ``None`` means the bound or the floor was hit first,
    which proves nothing about existence.
    """
    D = as_matrix(D, allow_pos_inf=False)
    C = as_matrix(C, allow_pos_inf=False)
    if D.shape != C.shape:
        raise ValueError(f"D and C must have equal shapes, got {D.shape} and {C.shape}")
    if iteration_bound < 1:
        raise ValueError("iteration_bound must be at least 1")
    x = np.zeros(D.shape[1])
    for _ in range(iteration_bound):
        Dx, Cx = mat_mul(D, x), mat_mul(C, x)
        fx = np.minimum(left_residual(D, Cx[:, None])[:, 0], left_residual(C, Dx[:, None])[:, 0])
        if np.all(x <= fx):
            return x
        x = np.minimum(x, fx)
        if np.any(x < floor):
            return None
    return None


def _from_solution(z: np.ndarray, layout: FeedbackLayout) -> tuple[np.ndarray, np.ndarray]:
    t, F, G = layout.unpack(z)
    return F - t, G - t


def solve_feedback(
    A,
    B,
    X: Semimodule,
    *,
    method: str = "auto",
    support=None,
    nonpositive: bool = False,
    iteration_bound: int = DEFAULT_ITERATION_BOUND,
    floor: int = DEFAULT_FLOOR,
) -> FeedbackResult:
    """Find ``F`` with ``(A ⊕ B F) X ⊆ X``, together with ``G``: ``(A ⊕ BF) Q = Q G``.

    ``method`` is ``"elimination"`` (exact decision), ``"minmax"`` (witness
    search only; a miss is reported as not found) or ``"auto"`` (min-max
    first, elimination to settle a miss).
    """
    if method not in ("auto", "elimination", "minmax"):
        raise ValueError(f"unknown method {method!r}")
    Q = X.gens
    A, B = _conform(A, B, Q)
    q, n = B.shape[1], X.dim
    if X.is_trivial:
        return FeedbackResult(zeros(q, n), zeros(0, 0), "trivial")

    system, layout = feedback_system(A, B, Q, support=support, nonpositive=nonpositive)
    if method in ("auto", "minmax"):
        z = minmax_subfixed(system.D, system.C, iteration_bound, floor)
        if z is not None:
            F, G = _from_solution(z, layout)
            return FeedbackResult(F, G, "minmax")
        if method == "minmax":
            return FeedbackResult(None, None, "minmax")
        log.info("min-max search found no witness; falling back to elimination")

    Z = solve_system(system).matrix
    finite_t = np.flatnonzero(Z[0] > NEG_INF)
    if finite_t.size == 0:
        return FeedbackResult(None, None, "elimination")
    F, G = _from_solution(Z[:, finite_t[0]], layout)
    return FeedbackResult(F, G, "elimination")


def closed_loop(A, B, F) -> np.ndarray:
    A = as_matrix(A, allow_pos_inf=False)
    return np.maximum(A, mat_mul(as_matrix(B, allow_pos_inf=False), as_matrix(F, allow_pos_inf=False)))


def check_feedback(A, B, F, X: Semimodule) -> bool:
    """``(A ⊕ B F) g ∈ X`` for every generator ``g``."""
    M = closed_loop(A, B, F)
    if M.shape != (X.dim, X.dim):
        raise ValueError(f"closed loop is {M.shape}, semimodule has dimension {X.dim}")
    if X.is_trivial:
        return True
    return bool(np.all(span_contains(X.gens, mat_mul(M, X.gens))))


@dataclass(frozen=True, eq=False)
class EigenResult:
    """``eigenvectors`` is empty when the eigenvalue is not an integer."""

    eigenvalue: Union[Fraction, float]
    eigenvectors: list[np.ndarray] = field(default_factory=list)

    @property
    def integral(self) -> bool:
        return isinstance(self.eigenvalue, Fraction) and self.eigenvalue.denominator == 1

    def eigenspace(self) -> Semimodule:
        dim = self.eigenvectors[0].size if self.eigenvectors else 0
        return Semimodule.from_columns(self.eigenvectors, dim)


def eigen(M) -> EigenResult:
    """Eigenvalue and critical-column eigenvectors of an irreducible matrix."""
    M = as_matrix(M, allow_pos_inf=False)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"eigen needs a square matrix, got {M.shape}")
    if not is_irreducible(M):
        raise ValueError("eigen requires an irreducible matrix")
    lam = spectral_radius(M)
    if not (isinstance(lam, Fraction) and lam.denominator == 1):
        return EigenResult(lam)
    shifted = M - int(lam)
    star = kleene_star(shifted).matrix
    critical = np.diag(mat_mul(shifted, star)) == 0
    cols = star[:, critical]
    cols = np.unique(cols - cols.max(axis=0), axis=1)
    return EigenResult(lam, [cols[:, j].copy() for j in range(cols.shape[1])])
