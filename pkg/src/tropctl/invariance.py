"""Maximal geometrically (A,B)-invariant semimodule contained in K.

The sequence ``X_1 = K``, ``X_{r+1} = φ(X_r)`` with
``φ(X) = X ∩ A⁻¹(X ⊖ Im B)`` is decreasing; once two consecutive terms agree
the common value is the answer.  It need not stabilize, so every run carries
an explicit step cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .linalg import as_matrix, delta_h, mat_mul
from .semimodule import (
    Semimodule,
    contains,
    intersect,
    ominus,
    preimage,
    semimodule_equal,
    span_contains,
)


def _conform(A, B, X: Semimodule):
    A = as_matrix(A, allow_pos_inf=False)
    B = as_matrix(B, allow_pos_inf=False)
    n = X.dim
    if A.shape != (n, n):
        raise ValueError(f"A must be {n}x{n}, got {A.shape}")
    if B.shape[0] != n:
        raise ValueError(f"B must have {n} rows, got {B.shape}")
    return A, B


def phi(X: Semimodule, A, B) -> Semimodule:
    A, B = _conform(A, B, X)
    if X.is_trivial:
        return X
    control = Semimodule.from_generators(B)
    return intersect(X, preimage(A, ominus(X, control)))


def check_geometric_invariance(X: Semimodule, A, B) -> bool:
    """Every generator ``g`` has ``A g ∈ X ⊖ Im B``."""
    A, B = _conform(A, B, X)
    if X.is_trivial:
        return True
    target = ominus(X, Semimodule.from_generators(B))
    return bool(np.all(span_contains(target.gens, mat_mul(A, X.gens))))


def corollary_bound(K: Semimodule) -> Optional[int]:
    """``(Δ+1)^n - Δ^n + 1`` for all-finite generators, else ``None``."""
    if K.is_trivial or not np.all(np.isfinite(K.gens)):
        return None
    d, n = delta_h(K.gens), K.dim
    return (d + 1) ** n - d**n + 1


@dataclass
class InvarianceReport:
    """Trace of the fixed-point iteration.

    ``steps[r - 1]`` holds ``X_r``.  When the run stabilizes at ``k`` the list
    ends with ``X_{k+1}``, which equals ``X_k``.
    """

    steps: list[Semimodule] = field(default_factory=list)
    stabilized_at: Optional[int] = None
    cap: int = 0
    bound: Optional[int] = None

    @property
    def cap_exceeded(self) -> bool:
        return self.stabilized_at is None

    @property
    def result(self) -> Optional[Semimodule]:
        if self.stabilized_at is None:
            return None
        return self.steps[self.stabilized_at - 1]

    def step(self, r: int) -> Semimodule:
        return self.steps[r - 1]


def max_invariant(K: Semimodule, A, B, cap: int) -> InvarianceReport:
    """Iterate ``φ`` from ``K`` until ``X_{k+1} = X_k`` for some ``k ≤ cap``."""
    if cap < 1:
        raise ValueError("cap must be at least 1")
    A, B = _conform(A, B, K)
    report = InvarianceReport(steps=[K], cap=cap, bound=corollary_bound(K))
    current = K
    for k in range(1, cap + 1):
        nxt = phi(current, A, B)
        report.steps.append(nxt)
        if semimodule_equal(nxt, current):
            report.stabilized_at = k
            break
        current = nxt
    return report


def is_decreasing(report: InvarianceReport) -> bool:
    return all(contains(a, b) for a, b in zip(report.steps, report.steps[1:]))
