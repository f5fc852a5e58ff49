"""Per-round-trip records produced by the two intracavity simulations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .analysis import CharacteristicMoments

if TYPE_CHECKING:
    from .gaussian import QuadState

#: A trajectory is flagged divergent once any single-mode variance passes this.
DIVERGENCE_GUARD = 1e6

#: Round-over-round |dK| below which the run is declared steady.
STEADY_STATE_DK = 1e-10

COLUMNS = ("round", "var_ux", "var_up", "var_Ux", "var_Up", "K", "diverged")


@dataclass
class Trajectory:
    """Characteristic variances and K sampled along a simulation run.

    Rows containing NaN originate from odd-N runs, for which the collective
    moments are undefined. ``rounds_to_converge`` is the first round where
    |dK| per round fell below the steady-state threshold, or None if that
    never happened.
    """

    rounds: np.ndarray
    var_ux: np.ndarray
    var_up: np.ndarray
    var_big_ux: np.ndarray
    var_big_up: np.ndarray
    k: np.ndarray
    diverged_flags: np.ndarray
    diverged: bool
    diverged_at: int | None
    rounds_to_converge: int | None
    final_state: "QuadState"
    measurements: object | None = field(default=None, repr=False)

    @property
    def final_k(self) -> float:
        return float(self.k[-1])

    def rows(self):
        """Row tuples matching :data:`COLUMNS`."""
        for i in range(len(self.rounds)):
            yield (int(self.rounds[i]), float(self.var_ux[i]), float(self.var_up[i]),
                   float(self.var_big_ux[i]), float(self.var_big_up[i]),
                   float(self.k[i]), int(self.diverged_flags[i]))


class TrajectoryRecorder:
    """Accumulates sampled rows and convergence metadata during a run.

    Every observation updates the convergence/divergence bookkeeping; a row
    is persisted when its round index hits the sampling stride, and the most
    recent observation is always flushed at :meth:`build` time so the final
    round of a run appears regardless of why the loop stopped.
    """

    def __init__(self, record_every: int = 1):
        if record_every < 1:
            raise ValueError("record_every must be >= 1")
        self.record_every = int(record_every)
        self._rows = []
        self._pending = None
        self._last_k = None
        self.rounds_to_converge = None
        self.diverged_at = None

    def observe(self, round_index: int, moments: CharacteristicMoments | None,
                diverged: bool) -> None:
        if moments is None:
            nan = float("nan")
            moments = CharacteristicMoments(nan, nan, nan, nan, nan)
        if diverged and self.diverged_at is None:
            self.diverged_at = round_index
        if (self._last_k is not None and self.rounds_to_converge is None
                and abs(moments.k_measure - self._last_k) < STEADY_STATE_DK):
            self.rounds_to_converge = round_index
        self._last_k = moments.k_measure
        self._pending = (round_index, moments.var_u_x, moments.var_u_p,
                         moments.var_big_u_x, moments.var_big_u_p,
                         moments.k_measure, 1 if diverged else 0)
        if diverged or round_index % self.record_every == 0:
            self._flush()

    def _flush(self) -> None:
        if self._pending is not None:
            if not self._rows or self._rows[-1][0] != self._pending[0]:
                self._rows.append(self._pending)

    @property
    def steady(self) -> bool:
        return self.rounds_to_converge is not None

    def build(self, final_state, measurements=None) -> Trajectory:
        self._flush()
        data = np.array(self._rows, dtype=float) if self._rows else np.zeros((0, 7))
        return Trajectory(
            rounds=data[:, 0].astype(int),
            var_ux=data[:, 1], var_up=data[:, 2],
            var_big_ux=data[:, 3], var_big_up=data[:, 4],
            k=data[:, 5],
            diverged_flags=data[:, 6].astype(int),
            diverged=self.diverged_at is not None,
            diverged_at=self.diverged_at,
            rounds_to_converge=self.rounds_to_converge,
            final_state=final_state,
            measurements=measurements,
        )
