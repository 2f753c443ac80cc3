"""Evolve a state until it settles, cycles, or hits an iteration cap.

Trajectories end in one of three ways: a fixed point (the usual case,
reported with the relaxation time ``n_st``), a periodic orbit with
period >= 2, or unresolved at the configured cap. Cycle detection keeps
an 8-byte digest per visited state; a digest hit is confirmed by
re-deriving the candidate state from the initial condition, so hash
collisions can never produce a wrong answer.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

from .dynamics import step
from .lattice import LatticeState, TorusShape

DEFAULT_STEP_CAP_FACTOR = 100


class OutcomeKind(str, Enum):
    FIXED = "fixed"
    PERIODIC = "periodic"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class TrajectoryOutcome:
    """Terminal report of one trajectory.

    ``steady_state`` is the fixed point, the state at cycle entry, or the
    last computed state, depending on ``kind``. ``n_st`` is the smallest n
    with T(n+1) = T(n) and is set for fixed outcomes only; ``entry_time``
    and ``period`` are set for periodic outcomes only.
    """

    kind: OutcomeKind
    steady_state: LatticeState
    steps_taken: int
    n_st: int | None = None
    entry_time: int | None = None
    period: int | None = None


def default_max_steps(shape: TorusShape) -> int:
    """Generous default cap: relaxation times grow slowly with torus size."""
    return DEFAULT_STEP_CAP_FACTOR * max(shape.dims)


def _digest(state: LatticeState) -> bytes:
    return hashlib.blake2b(state.values.tobytes(), digest_size=8).digest()


def _state_at(initial: LatticeState, n: int) -> LatticeState:
    cur = initial
    for _ in range(n):
        cur = step(cur)
    return cur


def evolve(initial: LatticeState, max_steps: int | None = None) -> TrajectoryOutcome:
    """Iterate the dynamics until a fixed point, a cycle, or the cap.

    A revisit of the immediately preceding state is a fixed point; any
    other revisit is periodic, and the first one found necessarily has
    the minimal period and the earliest entry time.
    """
    if max_steps is None:
        max_steps = default_max_steps(initial.shape)
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    # digest -> times of first occurrence of each distinct state with that digest
    seen: dict[bytes, list[int]] = {_digest(initial): [0]}
    cur = initial
    for now in range(max_steps):
        nxt = step(cur)
        if nxt == cur:
            return TrajectoryOutcome(
                OutcomeKind.FIXED, steady_state=cur, steps_taken=now + 1, n_st=now
            )
        digest = _digest(nxt)
        times = seen.get(digest)
        if times is None:
            seen[digest] = [now + 1]
        else:
            for first in times:
                if _state_at(initial, first) == nxt:
                    return TrajectoryOutcome(
                        OutcomeKind.PERIODIC,
                        steady_state=nxt,
                        steps_taken=now + 1,
                        entry_time=first,
                        period=now + 1 - first,
                    )
            times.append(now + 1)
        cur = nxt
    return TrajectoryOutcome(OutcomeKind.UNRESOLVED, steady_state=cur, steps_taken=max_steps)


def trajectory(initial: LatticeState, n: int) -> list[LatticeState]:
    """The first n+1 states T(0), T(1), ..., T(n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    states = [initial]
    for _ in range(n):
        states.append(step(states[-1]))
    return states
