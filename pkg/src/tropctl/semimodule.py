"""Finitely generated subsemimodules of Zmax^n.

Set operations (intersection, ``⊖``, inverse image) are reduced to a
two-sided system in stacked unknowns, solved by elimination, and projected
back by a coordinate selector.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import as_matrix, as_vector, delta_h, identity, left_residual, mat_mul, zeros
from .semiring import NEG_INF
from .twosided import GeneratorSet, TwoSidedSystem, minimize_generators, solve_system


@dataclass(frozen=True, eq=False)
class Semimodule:
    """``span`` of the columns of ``gens``, stored in canonical form.

    Build instances with :meth:`from_generators` (or :meth:`trivial`,
    :meth:`whole`); the constructor assumes canonical input.
    """

    gens: np.ndarray

    @classmethod
    def from_generators(cls, matrix, dim: Optional[int] = None) -> "Semimodule":
        if isinstance(matrix, GeneratorSet):
            M = matrix.matrix
        else:
            M = as_matrix(matrix, allow_pos_inf=False) if len(matrix) else np.empty((dim or 0, 0))
        if dim is not None and M.shape[0] != dim:
            raise ValueError(f"generators have dimension {M.shape[0]}, expected {dim}")
        return cls(minimize_generators(M).matrix)

    @classmethod
    def from_columns(cls, columns, dim: int) -> "Semimodule":
        cols = [as_vector(c, allow_pos_inf=False) for c in columns]
        if not cols:
            return cls.trivial(dim)
        return cls.from_generators(np.column_stack(cols), dim)

    @classmethod
    def trivial(cls, dim: int) -> "Semimodule":
        return cls(np.full((dim, 0), NEG_INF))

    @classmethod
    def whole(cls, dim: int) -> "Semimodule":
        return cls(minimize_generators(identity(dim)).matrix)

    @property
    def dim(self) -> int:
        return self.gens.shape[0]

    @property
    def is_trivial(self) -> bool:
        return self.gens.shape[1] == 0

    def __len__(self) -> int:
        return self.gens.shape[1]

    def __contains__(self, x) -> bool:
        return membership(x, self)

    def __repr__(self) -> str:
        return f"Semimodule(dim={self.dim}, gens={self.gens.tolist()})"


def _check_dims(X: Semimodule, Y: Semimodule) -> None:
    if X.dim != Y.dim:
        raise ValueError(f"ambient dimensions differ: {X.dim} vs {Y.dim}")


def span_contains(Q: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Which columns of ``X`` lie in ``Im Q`` (residuation round trip)."""
    if Q.shape[1] == 0:
        return np.all(X == NEG_INF, axis=0)
    return np.all(mat_mul(Q, left_residual(Q, X)) == X, axis=0)


def membership(x, X: Semimodule) -> bool:
    x = as_vector(x, allow_pos_inf=False)
    if x.size != X.dim:
        raise ValueError(f"vector of length {x.size} vs semimodule of dimension {X.dim}")
    return bool(span_contains(X.gens, x[:, None])[0])


def contains(X: Semimodule, Y: Semimodule) -> bool:
    """``Y ⊆ X``."""
    _check_dims(X, Y)
    if Y.is_trivial:
        return True
    return bool(np.all(span_contains(X.gens, Y.gens)))


def semimodule_equal(X: Semimodule, Y: Semimodule) -> bool:
    _check_dims(X, Y)
    return contains(X, Y) and contains(Y, X)


def _project(system: TwoSidedSystem, selector: np.ndarray) -> Semimodule:
    Z = solve_system(system).matrix
    if Z.shape[1] == 0:
        return Semimodule.trivial(selector.shape[0])
    return Semimodule.from_generators(mat_mul(selector, Z))


def intersect(X: Semimodule, Y: Semimodule) -> Semimodule:
    """``X ∩ Y`` from ``P u = Q w`` projected through ``P``."""
    _check_dims(X, Y)
    n, p, q = X.dim, len(X), len(Y)
    if p == 0 or q == 0:
        return Semimodule.trivial(n)
    D = np.hstack([X.gens, zeros(n, q)])
    C = np.hstack([zeros(n, p), Y.gens])
    return _project(TwoSidedSystem(D, C), D)


def ominus(X: Semimodule, B: Semimodule) -> Semimodule:
    """``X ⊖ B = {u : ∃ b ∈ B, u ⊕ b ∈ X}``.

    Unknowns ``(u, λ, μ)`` with ``u ⊕ Bλ = Qμ``, projected onto ``u``.
    """
    _check_dims(X, B)
    n, q, p = X.dim, len(B), len(X)
    D = np.hstack([identity(n), B.gens, zeros(n, p)])
    C = np.hstack([zeros(n, n + q), X.gens])
    selector = np.hstack([identity(n), zeros(n, q + p)])
    return _project(TwoSidedSystem(D, C), selector)


def preimage(A, X: Semimodule) -> Semimodule:
    """``A⁻¹(X) = {u : A u ∈ X}`` from ``A u = Q μ`` projected onto ``u``."""
    A = as_matrix(A, allow_pos_inf=False)
    m, n = A.shape
    if m != X.dim:
        raise ValueError(f"matrix with {m} rows vs semimodule of dimension {X.dim}")
    p = len(X)
    D = np.hstack([A, zeros(m, p)])
    C = np.hstack([zeros(m, n), X.gens])
    selector = np.hstack([identity(n), zeros(n, p)])
    return _project(TwoSidedSystem(D, C), selector)


def image(A, X: Semimodule) -> Semimodule:
    """``A X``, generated by ``A`` applied to the generators of ``X``."""
    A = as_matrix(A, allow_pos_inf=False)
    if A.shape[1] != X.dim:
        raise ValueError(f"matrix with {A.shape[1]} columns vs semimodule of dimension {X.dim}")
    if X.is_trivial:
        return Semimodule.trivial(A.shape[0])
    return Semimodule.from_generators(mat_mul(A, X.gens))


@dataclass(frozen=True)
class VolumeResult:
    """``count`` is ``None`` when some generator has an infinite entry."""

    count: Optional[int]

    @property
    def finite(self) -> bool:
        return self.count is not None


REQUIRES_ALL_FINITE = VolumeResult(None)


def volume(X: Semimodule) -> VolumeResult:
    """Number of members whose largest coordinate is 0.

    Only all-finite generating sets are handled: every member then has
    Hilbert seminorm at most ``Δ_H`` of the generators, so the box
    ``[-Δ_H, 0]^n`` holds all candidates.
    """
    if X.is_trivial:
        return VolumeResult(0)
    if not np.all(np.isfinite(X.gens)):
        return REQUIRES_ALL_FINITE
    n = X.dim
    width = delta_h(X.gens)
    count = 0
    values = np.arange(-width, 1, dtype=np.float64)
    for chunk in _batched(itertools.product(values, repeat=n), 1 << 15):
        pts = np.array(chunk, dtype=np.float64).T
        pts = pts[:, pts.max(axis=0) == 0]
        if pts.shape[1]:
            count += int(span_contains(X.gens, pts).sum())
    return VolumeResult(count)


def _batched(iterable, size):
    it = iter(iterable)
    while batch := list(itertools.islice(it, size)):
        yield batch
