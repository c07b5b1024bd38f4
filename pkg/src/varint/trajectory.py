"""Trajectory container and the generic stepping loop."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, VarintError
from .mechanics import PhaseState


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States along a fixed-step run: t has length n+1, q and p are (n+1, d)."""

    t: np.ndarray
    q: np.ndarray
    p: np.ndarray

    def __len__(self) -> int:
        return self.t.size

    @property
    def d(self) -> int:
        return self.q.shape[1]

    def state(self, k: int) -> PhaseState:
        return PhaseState(self.q[k], self.p[k])

    @property
    def final(self) -> PhaseState:
        return self.state(len(self) - 1)


def run_trajectory(step, initial: PhaseState, h: float, n_steps: int) -> Trajectory:
    """Apply ``step(state, h)`` n_steps times, collecting every state.

    Fails fast: the first step error is re-raised annotated with the step
    index at which it occurred.
    """
    n_steps = int(n_steps)
    if n_steps < 0:
        raise ConfigurationError(f"n_steps must be non-negative, got {n_steps}")
    d = initial.d
    t = np.arange(n_steps + 1, dtype=float) * h
    q = np.empty((n_steps + 1, d))
    p = np.empty((n_steps + 1, d))
    q[0], p[0] = initial.q, initial.p
    state = initial
    for k in range(n_steps):
        try:
            state = step(state, h)
        except VarintError as exc:
            exc.step_index = k
            if hasattr(exc, "add_note"):
                exc.add_note(f"while taking step {k} (t = {k * h:g})")
            raise
        q[k + 1], p[k + 1] = state.q, state.p
    return Trajectory(t, q, p)
