"""Nonlocal measurement-feedback coupling (scheme B).

Every round trip all pulses see loss, squeezing and loss, and then each
neighboring pair (k, k+1) is coupled in turn: both members are tapped by
out-coupling beamsplitters of transmissivity ``t_b`` (the cavity keeps the
sqrt(t_b) portion), the two extracted copies interfere on a 50/50
beamsplitter, and the two output ports are homodyned, x on one and p on the
other, with the assignment chosen by the bond parity. Conditioning the
cavity state on those outcomes creates the correlations; an ideal feedback
displacement then cancels the outcome-dependent kick to the mean vector, so
measurement backaction never accumulates in the first moments.

Each pulse is tapped twice per round trip, once as the left and once as the
right member of its two pairs, with a fresh coupler per pair; the pairs are
processed sequentially k = 0..N-1 with the last pair wrapping around the
ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analysis import gauged_moments
from .couplings import CouplingRing, build_m, invert_m
from .errors import InvalidParameterError
from .gaussian import HomodyneOutcome, QuadState
from .rng import MeasurementStream
from .trajectory import DIVERGENCE_GUARD, Trajectory, TrajectoryRecorder

#: draw(quadrature, mean, std) -> outcome value
OutcomeSampler = Callable[[str, float, float], float]


@dataclass(frozen=True)
class FeedbackParams:
    """Scheme-B run parameters.

    ``t_b`` is the out-coupling transmissivity; at t_b = 1 no light leaves
    the cavity and the measurements are blind. ``track_means`` switches on
    sampled homodyne outcomes (from the counter-based stream seeded by
    ``seed``) together with the cancelling feedback displacements; without
    it, outcomes are taken at their conditional means, which leaves the
    means identically zero and the covariances unchanged either way.
    """

    n_modes: int
    eta: float
    t_b: float
    loss_tot: float
    track_means: bool = False
    seed: int = 0
    feedback_gain: float = 1.0

    def __post_init__(self):
        if self.n_modes < 2:
            raise InvalidParameterError(f"n_modes must be >= 2, got {self.n_modes}")
        if not self.eta > 0.0:
            raise InvalidParameterError(f"eta must be > 0, got {self.eta}")
        if not 0.0 < self.t_b <= 1.0:
            raise InvalidParameterError(f"t_b must lie in (0, 1], got {self.t_b}")
        if not 0.0 <= self.loss_tot < 1.0:
            raise InvalidParameterError(f"loss_tot must lie in [0, 1), got {self.loss_tot}")
        if not 0.0 <= self.feedback_gain <= 1.0:
            raise InvalidParameterError(
                f"feedback_gain must lie in [0, 1], got {self.feedback_gain}")

    @property
    def interface_loss(self) -> float:
        return 1.0 - np.sqrt(1.0 - self.loss_tot)


@dataclass
class MeasurementRecord:
    """Homodyne outcomes of a tracked run, per round and per pair.

    ``rounds[n][k]`` holds the (x-type, p-type) outcome pair of pair k in
    round n; the x-type outcome estimates the bond's difference readout
    (x_k - s_k x_{k+1}) / sqrt(2) scaled by sqrt(1 - t_b).
    """

    n_pairs: int
    rounds: list

    def x_values(self, round_index: int) -> np.ndarray:
        return np.array([pair[0].value for pair in self.rounds[round_index]])

    def __len__(self) -> int:
        return len(self.rounds)


def pair_step(state: QuadState, k: int, s_k: int, t_b: float,
              draw: OutcomeSampler | None = None,
              feedback_gain: float = 1.0) -> tuple[HomodyneOutcome, HomodyneOutcome]:
    """Measurement-couple modes k and (k+1) mod N.

    Taps both modes against fresh vacuum ancillas, interferes the taps on a
    50/50 beamsplitter into the sum and difference ports, and homodynes x on
    the port matching the bond parity (difference port for a ferromagnetic
    bond) and p on the other. ``draw`` supplies outcome values given the
    conditional mean and standard deviation (None takes the mean, which is
    exact for covariance purposes). The feedback displacement moves the
    post-measurement means back toward their pre-measurement values by
    ``feedback_gain`` (1 = full cancellation).
    """
    n = state.n_modes
    k = int(k)
    if not 0 <= k < n:
        raise IndexError(f"pair index {k} out of range for {n} modes")
    partner = (k + 1) % n
    if partner == k:
        raise IndexError("pair coupling needs two distinct modes")
    if s_k not in (1, -1):
        raise InvalidParameterError(f"bond parity must be +1 or -1, got {s_k}")

    state.attach_vacuum(2)
    tap_k, tap_next = n, n + 1
    state.beamsplitter(k, tap_k, t_b)
    state.beamsplitter(partner, tap_next, t_b)
    # 50/50: port tap_k -> (a_k + a_{k+1})/sqrt(2) (sum), port tap_next -> difference
    state.beamsplitter(tap_k, tap_next, 0.5)
    sum_port, diff_port = tap_k, tap_next
    x_port, p_port = (diff_port, sum_port) if s_k == 1 else (sum_port, diff_port)

    out_x = _measure(state, x_port, "x", draw, feedback_gain)
    if p_port > x_port:
        p_port -= 1
    out_p = _measure(state, p_port, "p", draw, feedback_gain)
    return out_x, out_p


def _measure(state: QuadState, mode: int, quadrature: str,
             draw: OutcomeSampler | None, feedback_gain: float) -> HomodyneOutcome:
    outcome = None
    if draw is not None:
        mean = float(state.mean(quadrature)[mode])
        var = float(state.block(quadrature)[mode, mode])
        outcome = draw(quadrature, mean, np.sqrt(var))
    prior = np.delete(state.mean(quadrature), mode)
    result = state.homodyne(mode, quadrature, outcome=outcome)
    if feedback_gain != 0.0:
        shift = feedback_gain * (prior - state.mean(quadrature))
        if quadrature == "x":
            state.displace(dx=shift)
        else:
            state.displace(dp=shift)
    return result


def round_trip(state: QuadState, params: FeedbackParams, ring: CouplingRing,
               round_index: int, stream: MeasurementStream | None = None) -> list:
    """One full round trip: loss/squeeze/loss, then all N pair couplings."""
    el = params.interface_loss
    state.loss(el)
    state.squeeze(params.eta)
    state.loss(el)
    outcomes = []
    for k in range(params.n_modes):
        draw = None
        if stream is not None:
            draw = _stream_sampler(stream, round_index, k)
        outcomes.append(pair_step(state, k, ring.signs[k], params.t_b,
                                  draw=draw, feedback_gain=params.feedback_gain))
    return outcomes


def _stream_sampler(stream: MeasurementStream, round_index: int,
                    pair_index: int) -> OutcomeSampler:
    def draw(quadrature: str, mean: float, std: float) -> float:
        return stream.normal(round_index, pair_index, quadrature, mean, std)
    return draw


def simulate(params: FeedbackParams, ring: CouplingRing, n_rounds: int,
             record_every: int = 1, stop_at_steady: bool = False,
             guard: float = DIVERGENCE_GUARD) -> Trajectory:
    """Run the measurement-feedback dynamics from vacuum.

    Identical seeds give bit-identical trajectories. When ``track_means`` is
    set, the returned trajectory carries the full :class:`MeasurementRecord`.
    """
    if ring.n_modes != params.n_modes:
        raise InvalidParameterError(
            f"ring has {ring.n_modes} bonds but params declare {params.n_modes} modes")
    if n_rounds < 1:
        raise InvalidParameterError(f"n_rounds must be >= 1, got {n_rounds}")
    even = params.n_modes % 2 == 0
    state = QuadState.vacuum(params.n_modes)
    stream = MeasurementStream(params.seed) if params.track_means else None
    record = MeasurementRecord(n_pairs=params.n_modes, rounds=[]) if params.track_means else None
    recorder = TrajectoryRecorder(record_every)
    recorder.observe(0, gauged_moments(state, ring) if even else None, False)
    for n in range(1, n_rounds + 1):
        outcomes = round_trip(state, params, ring, n - 1, stream)
        if record is not None:
            record.rounds.append(outcomes)
        diverged = state.max_diagonal_variance() > guard
        moments = gauged_moments(state, ring) if even else None
        recorder.observe(n, moments, diverged)
        if diverged or (stop_at_steady and recorder.steady):
            break
    return recorder.build(state, measurements=record)


def infer_means(x_outcomes, ring: CouplingRing,
                out_coupling: float | None = None) -> np.ndarray:
    """Recover per-mode x means from one round of difference readouts.

    ``x_outcomes`` holds the N x-type outcomes in pair order. They are taken
    to be in difference-readout normalization ((x_k - s_k x_{k+1}) / sqrt(2));
    pass ``out_coupling = t_b`` to first undo the sqrt(1 - t_b) out-coupling
    scale of raw detector values. Only frustrated rings (S* = -1) have an
    invertible readout basis.
    """
    y = np.asarray(x_outcomes, dtype=float)
    if y.shape != (ring.n_modes,):
        raise InvalidParameterError(
            f"need {ring.n_modes} outcomes (one per pair), got shape {y.shape}")
    if out_coupling is not None:
        if not 0.0 < out_coupling < 1.0:
            raise InvalidParameterError(
                f"out_coupling must lie in (0, 1) to rescale, got {out_coupling}")
        y = y / np.sqrt(1.0 - out_coupling)
    basis = build_m(ring)
    return invert_m(basis) @ y
