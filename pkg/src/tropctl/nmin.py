"""Problems over Nmin = (N ∪ {+inf}, min, +) recast over Zmax.

Negating finite values turns ``min`` into ``max`` but loses the restriction
of scalars to the naturals: a Zmax semimodule is closed under every integer
shift, an Nmin semimodule only under nonnegative ones.  The encoding below
restores it with two homogenizing coordinates.

An Nmin vector ``x`` becomes ``(0, 0, -x)`` in Zmax^(n+2) (``+inf`` maps to
``-inf``).  A generator ``g`` of ``K`` becomes ``(0, 0, -g)`` and the extra
generator ``(0, 0, -inf, ...)`` lets shifts ``λ ≤ 0`` (naturals after
negation) act on one generator while another carries the top.  The dynamics
copy ``t`` into both homogenizing coordinates, while controls feed only the
first; invariant sets require the two to agree, which forces every control to
stay below ``t``, i.e. to be a natural number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, zeros
from .semimodule import Semimodule
from .semiring import NEG_INF, POS_INF


def to_zmax(M) -> np.ndarray:
    """Entrywise ``x ↦ -x`` with ``+inf ↦ -inf``."""
    M = as_matrix(M, allow_pos_inf=True)
    if np.isneginf(M).any():
        raise ValueError("Nmin values cannot be -inf")
    finite = M[np.isfinite(M)]
    if finite.size and finite.min() < 0:
        raise ValueError("Nmin values must be natural numbers or +inf")
    out = 0.0 - M
    out[np.isposinf(M)] = NEG_INF
    return out


def from_zmax(M: np.ndarray) -> np.ndarray:
    out = 0.0 - np.asarray(M, dtype=np.float64)
    out[np.isneginf(M)] = POS_INF
    return out


@dataclass(frozen=True, eq=False)
class NminEncoding:
    """Zmax data equivalent to an Nmin control problem ``(A, B, K)``."""

    A: np.ndarray
    B: np.ndarray
    K: Semimodule
    n: int
    q: int

    @property
    def feedback_support(self) -> np.ndarray:
        """Feedback entries allowed to be finite: real controls reading real states."""
        mask = np.zeros((self.q + 1, self.n + 2), dtype=bool)
        mask[: self.q, 2:] = True
        return mask

    def encode_vector(self, x) -> np.ndarray:
        return np.concatenate([[0.0, 0.0], to_zmax([[v] for v in x])[:, 0]])

    def encode_semimodule(self, generators) -> Semimodule:
        G = to_zmax(generators)
        cols = np.vstack([np.zeros((2, G.shape[1])), G])
        control = np.concatenate([[0.0, 0.0], np.full(self.n, NEG_INF)])[:, None]
        return Semimodule.from_generators(np.hstack([cols, control]))

    def decode_generators(self, X: Semimodule) -> np.ndarray:
        """Nmin generators of the slice ``t = 0`` of ``X`` (as an ``n x p`` array)."""
        G = X.gens
        if G.shape[1] == 0:
            return np.empty((self.n, 0))
        if not np.array_equal(G[0], G[1]) or np.isneginf(G[0]).any():
            raise ValueError("semimodule is not in homogenized form")
        return from_zmax(G[2:] - G[0])

    def decode_feedback(self, F: np.ndarray) -> np.ndarray:
        return from_zmax(F[: self.q, 2:])


def encode(A, B, K_generators) -> NminEncoding:
    A = to_zmax(A)
    B = to_zmax(B)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape[0] != n:
        raise ValueError(f"incompatible shapes A {A.shape}, B {B.shape}")
    q = B.shape[1]
    Ah = zeros(n + 2, n + 2)
    Ah[0, 0] = Ah[1, 0] = 0.0
    Ah[2:, 2:] = A
    Bh = zeros(n + 2, q + 1)
    Bh[0, :] = 0.0
    Bh[2:, :q] = B
    enc = NminEncoding(Ah, Bh, Semimodule.trivial(n + 2), n, q)
    K = enc.encode_semimodule(K_generators)
    return NminEncoding(Ah, Bh, K, n, q)
