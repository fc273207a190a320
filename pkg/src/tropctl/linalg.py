"""Dense max-plus matrices.

A matrix is a two-dimensional ``numpy.float64`` array whose finite entries
are integers.  ``-inf`` is the max-plus zero; ``+inf`` only shows up in the
results of residuation.  Every product checks that finite values stay in the
range where float64 represents integers exactly and raises ``OverflowError``
otherwise, so results are either exact or loudly rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .semiring import NEG_INF, POS_INF, Scalar, parse_scalar

# Largest magnitude for which float64 arithmetic on integers is exact.
EXACT_LIMIT = 2.0**53

# Max-plus products are evaluated in slabs of at most this many float64 cells.
_SLAB = 1 << 22


def _check_exact(M: np.ndarray) -> np.ndarray:
    finite = M[np.isfinite(M)]
    if finite.size and np.abs(finite).max() >= EXACT_LIMIT:
        raise OverflowError("finite entry exceeds exact integer range of the matrix backend")
    return M


def as_matrix(data, *, allow_pos_inf: bool = True) -> np.ndarray:
    """Convert nested lists / arrays to a validated max-plus matrix.

    String tokens ``"-inf"`` and ``"+inf"`` are accepted.  Fractional values
    and NaN raise ``ValueError``.
    """
    if isinstance(data, np.ndarray) and data.dtype == np.float64:
        M = data
    else:
        rows = data.tolist() if isinstance(data, np.ndarray) else data
        M = np.array([[float(parse_scalar(v)) for v in row] for row in rows], dtype=np.float64)
        if M.size == 0:
            M = M.reshape(len(rows), 0)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {M.shape}")
    if np.isnan(M).any():
        raise ValueError("matrix contains NaN")
    finite = M[np.isfinite(M)]
    if finite.size and not np.all(finite == np.round(finite)):
        raise ValueError("matrix entries must be integers or infinities")
    if not allow_pos_inf and np.isposinf(M).any():
        raise ValueError("+inf is not allowed here")
    return _check_exact(M)


def as_vector(data, *, allow_pos_inf: bool = True) -> np.ndarray:
    if isinstance(data, np.ndarray) and data.ndim == 2:
        if data.shape[1] != 1:
            raise ValueError(f"expected a vector, got shape {data.shape}")
        data = data[:, 0]
    if isinstance(data, np.ndarray):
        items = data.tolist()
    else:
        items = list(data)
    return as_matrix([[v] for v in items], allow_pos_inf=allow_pos_inf)[:, 0]


def identity(n: int) -> np.ndarray:
    M = np.full((n, n), NEG_INF)
    np.fill_diagonal(M, 0.0)
    return M


def zeros(rows: int, cols: int) -> np.ndarray:
    """The max-plus zero matrix (every entry ``-inf``)."""
    return np.full((rows, cols), NEG_INF)


def oplus(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch {A.shape} vs {B.shape}")
    return np.maximum(A, B)


def block(rows) -> np.ndarray:
    return np.block([[np.asarray(b, dtype=np.float64) for b in row] for row in rows])


def mat_mul(A, B, mode: str = "max") -> np.ndarray:
    """Tropical product ``A ⊗ B``.

    ``mode="max"`` is the max-plus product where ``-inf`` absorbs ``+inf``;
    ``mode="min"`` is the min-plus product where ``+inf`` absorbs ``-inf``.
    A one-dimensional ``B`` is treated as a column vector and a vector is
    returned.
    """
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    vector = B.ndim == 1
    if vector:
        B = B[:, None]
    if A.ndim != 2 or B.ndim != 2:
        raise ValueError("mat_mul expects matrices")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} ⊗ {B.shape}")
    if mode == "max":
        zero, reduce = NEG_INF, np.max
    elif mode == "min":
        zero, reduce = POS_INF, np.min
    else:
        raise ValueError(f"unknown product mode {mode!r}")

    m, k = A.shape
    n = B.shape[1]
    out = np.full((m, n), zero)
    if k == 0 or m == 0 or n == 0:
        return out[:, 0] if vector else out
    mixed = (np.isposinf(A).any() or np.isposinf(B).any()) and (
        np.isneginf(A).any() or np.isneginf(B).any()
    )
    step = max(1, _SLAB // max(1, m * k))
    with np.errstate(invalid="ignore"):
        for lo in range(0, n, step):
            S = A[:, :, None] + B[None, :, lo : lo + step]
            if mixed:
                S[np.isnan(S)] = zero
            out[:, lo : lo + step] = reduce(S, axis=1)
    _check_exact(out)
    return out[:, 0] if vector else out


def left_residual(D, C) -> np.ndarray:
    """``D \\ C``: the greatest ``X`` with ``D ⊗ X ≤ C``.

    Computed as ``(-Dᵀ) ⊗ C`` in the completed min-plus semiring, so the
    result may contain ``+inf`` (unconstrained entries).
    """
    D = np.asarray(D, dtype=np.float64)
    C = np.asarray(C, dtype=np.float64)
    if D.shape[0] != C.shape[0]:
        raise ValueError(f"dimension mismatch: {D.shape} \\ {C.shape}")
    return mat_mul(-D.T, C, mode="min")


def right_residual(C, D) -> np.ndarray:
    """``C / D``: the greatest ``X`` with ``X ⊗ D ≤ C``."""
    C = np.asarray(C, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    if C.shape[1] != D.shape[1]:
        raise ValueError(f"dimension mismatch: {C.shape} / {D.shape}")
    return mat_mul(C, -D.T, mode="min")


def leq(A, B) -> bool:
    return bool(np.all(np.asarray(A) <= np.asarray(B)))


def _require_square(A: np.ndarray, what: str) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{what} needs a square matrix, got shape {A.shape}")
    return A.shape[0]


@dataclass(frozen=True)
class StarResult:
    """Outcome of :func:`kleene_star`; ``matrix`` is ``None`` when divergent."""

    matrix: Optional[np.ndarray]

    @property
    def converged(self) -> bool:
        return self.matrix is not None

    @property
    def diverged(self) -> bool:
        return self.matrix is None


def kleene_star(E) -> StarResult:
    """``E* = I ⊕ E ⊕ E² ⊕ ⋯`` via repeated squaring of ``I ⊕ E``.

    Squaring until the exponent reaches ``n`` exposes every elementary
    circuit on the diagonal; a positive diagonal entry means some circuit has
    positive weight and the series diverges.
    """
    E = as_matrix(E, allow_pos_inf=False)
    n = _require_square(E, "kleene_star")
    P = np.maximum(identity(n), E)
    power = 1
    while power < n:
        P = mat_mul(P, P)
        power *= 2
    if np.any(np.diag(P) > 0):
        return StarResult(None)
    return StarResult(P)


def spectral_radius(A) -> Union[Fraction, float]:
    """Maximal circuit mean of the precedence graph, as an exact ``Fraction``.

    Uses Karp's recurrence on walks ending at each node, started from a
    virtual source joined to every node, so reducible matrices are handled
    too.  Returns ``NEG_INF`` for an acyclic graph.
    """
    A = as_matrix(A, allow_pos_inf=False)
    n = _require_square(A, "spectral_radius")
    walks = [np.zeros(n)]
    for _ in range(n):
        walks.append(mat_mul(A, walks[-1]))
    last = walks[n]
    best: Union[Fraction, float] = NEG_INF
    for v in range(n):
        if last[v] == NEG_INF:
            continue
        worst = None
        for k in range(n):
            if walks[k][v] == NEG_INF:
                continue
            mean = Fraction(int(last[v]) - int(walks[k][v]), n - k)
            if worst is None or mean < worst:
                worst = mean
        if worst is not None and (best == NEG_INF or worst > best):
            best = worst
    return best


def is_irreducible(A) -> bool:
    """True iff the precedence graph (arc i→j when ``a_ji`` is finite) is strongly connected."""
    A = np.asarray(A, dtype=np.float64)
    n = _require_square(A, "is_irreducible")
    if n == 1:
        return True
    support = csr_matrix(np.isfinite(A).astype(np.int8))
    count, _ = connected_components(support, directed=True, connection="strong")
    return count == 1


def is_invertible(P) -> bool:
    """Max-plus invertible: a permutation matrix with finite non-zero scalars."""
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        return False
    finite = np.isfinite(P)
    if np.isposinf(P).any():
        return False
    return bool(np.all(finite.sum(axis=0) == 1) and np.all(finite.sum(axis=1) == 1))


def hilbert_seminorm(x) -> int:
    """``max_i x_i - min_i x_i`` for a vector with finite entries."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("empty vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("Hilbert seminorm needs finite entries")
    return int(x.max() - x.min())


def delta_h(K) -> int:
    """Largest Hilbert seminorm among the columns of an all-finite matrix."""
    K = np.asarray(K, dtype=np.float64)
    if K.ndim != 2 or K.shape[1] == 0:
        raise ValueError("delta_h needs a matrix with at least one column")
    if not np.all(np.isfinite(K)):
        raise ValueError("delta_h needs finite entries")
    return int((K.max(axis=0) - K.min(axis=0)).max())


def scalar_at(M: np.ndarray, i: int, j: int) -> Scalar:
    v = float(M[i, j])
    return v if np.isinf(v) else int(v)
