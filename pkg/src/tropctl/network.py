"""Timetable synthesis for a railway network modelled as a timed event graph.

``x_i(k)`` is the k-th departure time in direction ``i``.  A train leaving in
direction ``i`` comes from direction ``pred(i)`` and must also wait for the
connecting trains from each direction in ``connections(i)``, so

    x(k) = A x(k-1) ⊕ u(k),   a_ij = t_j  for j ∈ connections(i) ∪ {pred(i)},

with the timetable ``u(k)`` as control.  Directions are 0-based here; the
JSON format is 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .feedback import EigenResult, FeedbackResult, closed_loop, eigen, solve_feedback
from .invariance import InvarianceReport, max_invariant
from .linalg import (
    StarResult,
    as_matrix,
    as_vector,
    block,
    identity,
    is_irreducible,
    kleene_star,
    mat_mul,
    zeros,
)
from .semimodule import Semimodule, intersect, membership


@dataclass(frozen=True, eq=False)
class NetworkSpec:
    """``headway`` is per direction; ``connection[i, j]`` bounds waits of ``i`` on train ``j``."""

    travel: tuple[int, ...]
    pred: tuple[int, ...]
    connections: tuple[frozenset, ...]
    headway: np.ndarray
    connection: np.ndarray

    def __post_init__(self):
        n = len(self.travel)
        if n == 0:
            raise ValueError("network needs at least one direction")
        if len(self.pred) != n or len(self.connections) != n:
            raise ValueError("travel, pred and connections must have one entry per direction")
        if any(t < 0 for t in self.travel):
            raise ValueError("travel times must be nonnegative")
        for i, (r, conn) in enumerate(zip(self.pred, self.connections)):
            if not 0 <= r < n or any(not 0 <= j < n for j in conn):
                raise ValueError(f"direction index out of range at direction {i + 1}")
        if self.headway.shape != (n,) or self.connection.shape != (n, n):
            raise ValueError("bound arrays have the wrong shape")
        if (self.headway < 0).any() or (self.connection < 0).any():
            raise ValueError("bounds must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.travel)

    @classmethod
    def create(
        cls,
        travel: Sequence[int],
        pred: Sequence[int],
        connections: Sequence[Sequence[int]],
        L: Union[int, Sequence[int]],
        M: Union[int, Sequence[Sequence[int]]],
    ) -> "NetworkSpec":
        """0-based indices; ``L`` and ``M`` may be uniform integers."""
        n = len(travel)
        headway = np.full(n, L, dtype=np.int64) if np.isscalar(L) else np.asarray(L, dtype=np.int64)
        connection = (
            np.full((n, n), M, dtype=np.int64) if np.isscalar(M) else np.asarray(M, dtype=np.int64)
        )
        return cls(
            tuple(int(t) for t in travel),
            tuple(int(r) for r in pred),
            tuple(frozenset(int(j) for j in c) for c in connections),
            headway,
            connection,
        )

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkSpec":
        """Parse the JSON form (1-based direction numbers)."""
        missing = {"travel", "pred", "connections", "L", "M"} - data.keys()
        if missing:
            raise ValueError(f"network description lacks {sorted(missing)}")
        n = data.get("directions", len(data["travel"]))
        if n != len(data["travel"]):
            raise ValueError("'directions' disagrees with the length of 'travel'")
        for key in ("travel", "pred"):
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in data[key]):
                raise ValueError(f"'{key}' must hold integers")
        return cls.create(
            data["travel"],
            [r - 1 for r in data["pred"]],
            [[j - 1 for j in c] for c in data["connections"]],
            data["L"],
            data["M"],
        )

    def to_dict(self) -> dict:
        uniform_l = len(set(self.headway.tolist())) == 1
        uniform_m = len(set(self.connection.ravel().tolist())) == 1
        return {
            "directions": self.n,
            "travel": list(self.travel),
            "pred": [r + 1 for r in self.pred],
            "connections": [sorted(j + 1 for j in c) for c in self.connections],
            "L": int(self.headway[0]) if uniform_l else self.headway.tolist(),
            "M": int(self.connection[0, 0]) if uniform_m else self.connection.tolist(),
        }


def build_dynamics(spec: NetworkSpec) -> np.ndarray:
    n = spec.n
    A = zeros(n, n)
    for i in range(n):
        for j in spec.connections[i] | {spec.pred[i]}:
            A[i, j] = spec.travel[j]
    return A


def extended_matrices(A) -> tuple[np.ndarray, np.ndarray]:
    """``Ā = [[A, ε], [I, ε]]`` and ``B̄ = [[I], [ε]]`` for the state ``(x(k), x(k-1))``."""
    A = as_matrix(A, allow_pos_inf=False)
    n = A.shape[0]
    Abar = block([[A, zeros(n, n)], [identity(n), zeros(n, n)]])
    Bbar = block([[identity(n)], [zeros(n, n)]])
    return Abar, Bbar


def constraint_matrix(spec: NetworkSpec) -> np.ndarray:
    """``E`` such that ``E x̄ ≤ x̄`` encodes the headway, connection and physical constraints."""
    A = build_dynamics(spec)
    n = spec.n
    lower = zeros(n, n)
    rows, cols = np.nonzero(np.isfinite(A.T))
    # x_i(k-1) ≥ x_j(k) - a_ji - M_ij on the support of A
    lower[rows, cols] = -A.T[rows, cols] - spec.connection[rows, cols]
    diag = np.arange(n)
    lower[diag, diag] = np.maximum(lower[diag, diag], -spec.headway)
    return block([[zeros(n, n), np.maximum(identity(n), A)], [lower, zeros(n, n)]])


def build_spec(spec: NetworkSpec) -> tuple[np.ndarray, StarResult]:
    E = constraint_matrix(spec)
    return E, kleene_star(E)


class InfeasibleSpecification(ValueError):
    """The constraint system has a positive circuit: no timetable can satisfy it."""


@dataclass
class SynthesisOutput:
    A: np.ndarray
    Abar: np.ndarray
    Bbar: np.ndarray
    E: np.ndarray
    E_star: np.ndarray
    K: Semimodule
    report: InvarianceReport
    feedback: Optional[FeedbackResult] = None
    eigen: Optional[EigenResult] = None
    periodic: Optional["PeriodicTimetable"] = None

    @property
    def K_star(self) -> Optional[Semimodule]:
        return self.report.result


@dataclass(frozen=True, eq=False)
class PeriodicTimetable:
    """``u(k) = kλ + offset`` started from the extended state ``x0``."""

    period: int
    x0: np.ndarray
    offset: np.ndarray = field(init=False)

    def __post_init__(self):
        n = self.x0.size // 2
        object.__setattr__(self, "offset", self.x0[:n].copy())

    def u(self, k: int) -> np.ndarray:
        return self.offset + k * self.period

    def schedule(self, steps: int) -> list[np.ndarray]:
        return [self.u(k) for k in range(1, steps + 1)]


def synthesize(spec: NetworkSpec, cap: int = 64) -> SynthesisOutput:
    """Specification, maximal invariant subset, feedback and periodic timetable.

    Later stages are skipped (left ``None``) when an earlier one fails: the
    cap is exceeded, no feedback exists, or the closed loop is reducible.
    """
    A = build_dynamics(spec)
    Abar, Bbar = extended_matrices(A)
    E, star = build_spec(spec)
    if star.diverged:
        raise InfeasibleSpecification("constraint matrix has a positive circuit")
    K = Semimodule.from_generators(star.matrix)
    report = max_invariant(K, Abar, Bbar, cap)
    out = SynthesisOutput(A, Abar, Bbar, E, star.matrix, K, report)
    if report.cap_exceeded:
        return out
    K_star = report.result
    out.feedback = solve_feedback(Abar, Bbar, K_star)
    if not out.feedback.found or K_star.is_trivial:
        return out
    M = closed_loop(Abar, Bbar, out.feedback.F)
    if not is_irreducible(M):
        return out
    out.eigen = eigen(M)
    out.periodic = periodic_witness(out.eigen, K_star)
    return out


def periodic_witness(result: EigenResult, K_star: Semimodule) -> Optional[PeriodicTimetable]:
    """Eigenvector inside ``K_star``, searched among ``Im V ∩ K_star`` generators."""
    if not result.integral or not result.eigenvectors:
        return None
    candidates = list(result.eigenvectors)
    common = intersect(result.eigenspace(), K_star)
    candidates += [common.gens[:, j] for j in range(len(common))]
    for v in candidates:
        if np.all(np.isfinite(v)) and membership(v, K_star):
            return PeriodicTimetable(int(result.eigenvalue), _anchor(v))
    return None


def _anchor(v: np.ndarray) -> np.ndarray:
    """Shift so the smallest entry is 0."""
    return v - v.min()


@dataclass(frozen=True)
class Violation:
    """``kind`` is ``"headway"`` or ``"connection"``; directions are 0-based.

    For a connection, ``direction`` waits for the train from ``other``;
    ``value`` is the measured quantity, to compare with ``bound``.
    """

    kind: str
    step: int
    direction: int
    other: int
    value: int
    bound: int

    def describe(self) -> str:
        if self.kind == "headway":
            return (
                f"step {self.step}: direction d{self.direction + 1} departures "
                f"{self.value} apart (bound {self.bound})"
            )
        return (
            f"step {self.step}: passengers from d{self.other + 1} wait {self.value} "
            f"for d{self.direction + 1} (bound {self.bound})"
        )


@dataclass
class Trajectory:
    """``states[k]`` is ``x(k)`` for ``k = -1 .. steps`` shifted by one (``states[0] = x(-1)``)."""

    states: list[np.ndarray]
    violations: list[Violation]

    def x(self, k: int) -> np.ndarray:
        return self.states[k + 1]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_physical(A: np.ndarray, xbar0) -> bool:
    """``x(-1) ≤ x(0)`` and ``A x(-1) ≤ x(0)``."""
    n = A.shape[0]
    now, before = xbar0[:n], xbar0[n:]
    return bool(np.all(np.maximum(before, mat_mul(A, before)) <= now))


def simulate(
    spec: NetworkSpec,
    xbar0,
    steps: int,
    *,
    feedback=None,
    timetable: Optional[Sequence] = None,
) -> Trajectory:
    """Run ``x(k) = A x(k-1) ⊕ u(k)`` for ``k = 1 .. steps``.

    The control is ``u(k) = F x̄(k-1)`` with ``feedback``, the ``k``-th entry
    of ``timetable``, or absent.  Every transition, including
    ``x(-1) → x(0)``, is checked against the headway and connection bounds.
    """
    if feedback is not None and timetable is not None:
        raise ValueError("give either a feedback or a timetable, not both")
    A = build_dynamics(spec)
    n = spec.n
    xbar0 = as_vector(xbar0, allow_pos_inf=False)
    if xbar0.size != 2 * n:
        raise ValueError(f"initial extended state must have length {2 * n}, got {xbar0.size}")
    if not np.all(np.isfinite(xbar0)):
        raise ValueError("initial extended state must be finite")
    if not check_physical(A, xbar0):
        raise ValueError("initial extended state violates x(-1) ≤ x(0) or A x(-1) ≤ x(0)")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    if feedback is not None:
        F = as_matrix(feedback, allow_pos_inf=False)
        if F.shape != (n, 2 * n):
            raise ValueError(f"feedback must be {n}x{2 * n}, got {F.shape}")
    if timetable is not None:
        if len(timetable) < steps:
            raise ValueError(f"timetable has {len(timetable)} entries, need {steps}")
        timetable = [as_vector(u, allow_pos_inf=False) for u in timetable]
        if any(u.size != n for u in timetable):
            raise ValueError(f"timetable entries must have length {n}")

    states = [xbar0[n:].copy(), xbar0[:n].copy()]
    for k in range(1, steps + 1):
        prev = states[-1]
        nxt = mat_mul(A, prev)
        if feedback is not None:
            nxt = np.maximum(nxt, mat_mul(F, np.concatenate([prev, states[-2]])))
        elif timetable is not None:
            nxt = np.maximum(nxt, timetable[k - 1])
        states.append(nxt)
    return Trajectory(states, _violations(spec, A, states))


def _violations(spec: NetworkSpec, A: np.ndarray, states: list[np.ndarray]) -> list[Violation]:
    found = []
    support = np.argwhere(np.isfinite(A))
    for idx in range(1, len(states)):
        k = idx - 1
        before, now = states[idx - 1], states[idx]
        gap = now - before
        for i in np.flatnonzero(gap > spec.headway):
            found.append(Violation("headway", k, int(i), int(i), int(gap[i]), int(spec.headway[i])))
        for j, i in support:
            # direction j waits on train from i; passengers of i wait this long
            wait = now[j] - A[j, i] - before[i]
            if wait > spec.connection[i, j]:
                found.append(Violation("connection", k, int(j), int(i), int(wait), int(spec.connection[i, j])))
    return found


def eigen_pair_in(result: EigenResult, v, K_star: Semimodule) -> bool:
    """``v`` lies in the eigenspace and in ``K_star``."""
    return membership(v, result.eigenspace()) and membership(v, K_star)


def figure_one() -> NetworkSpec:
    """Four-direction example network with ``L = 15`` and ``M = 4``."""
    return NetworkSpec.create(
        travel=[14, 17, 11, 9],
        pred=[1, 3, 2, 0],
        connections=[[], [2], [0, 3], [2]],
        L=15,
        M=4,
    )
