"""All-optical coupling through a single-pulse delay line (scheme A).

Every round trip, each pulse passes an interface loss, parametric squeezing
and a second interface loss, is then tapped by a coupler of transmissivity
``t_a`` into the delay line, and finally absorbs the delayed tap of its
predecessor (with the bond's parity applied) through an identical coupler
whose spare output port is discarded. The tap of the last pulse stays in
flight and meets the first pulse of the next round trip, closing the ring.

The module also carries the closed-form effective model obtained by letting
all pulses see the couplers simultaneously: each collective moment then
obeys a scalar recursion v -> factor * v + drive whose solution is
geometric, v_n = w + factor^n (1/2 - w) with w = drive / (1 - factor), or
linear in n when the factor is exactly 1. The uniform-x moment's factor
eta^2 (1 - loss_tot) crossing unity marks the divergence threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import CharacteristicMoments, characteristic_vectors
from .couplings import CouplingRing, seam_gauge
from .errors import InvalidParameterError, NoSteadyStateError
from .gaussian import QuadState
from .trajectory import DIVERGENCE_GUARD, Trajectory, TrajectoryRecorder

_LINEAR_TOL = 1e-12


@dataclass(frozen=True)
class DelayLineParams:
    """Scheme-A run parameters.

    ``loss_tot`` is the total intrinsic round-trip loss, realized as two
    equal interface losses L = 1 - sqrt(1 - loss_tot) just before and after
    the squeezer.
    """

    n_modes: int
    eta: float
    t_a: float
    loss_tot: float

    def __post_init__(self):
        if self.n_modes < 2:
            raise InvalidParameterError(f"n_modes must be >= 2, got {self.n_modes}")
        if not self.eta > 0.0:
            raise InvalidParameterError(f"eta must be > 0, got {self.eta}")
        if not 0.0 <= self.t_a <= 1.0:
            raise InvalidParameterError(f"t_a must lie in [0, 1], got {self.t_a}")
        if not 0.0 <= self.loss_tot < 1.0:
            raise InvalidParameterError(f"loss_tot must lie in [0, 1), got {self.loss_tot}")

    @property
    def interface_loss(self) -> float:
        """Per-interface reflectivity L with (1 - L)^2 = 1 - loss_tot."""
        return 1.0 - math.sqrt(1.0 - self.loss_tot)


@dataclass(frozen=True)
class GeometricRecursion:
    """Scalar recursion v_{n+1} = factor * v_n + drive with v_0 = 1/2."""

    factor: float
    drive: float

    def at(self, n: int) -> float:
        if n < 0:
            raise InvalidParameterError(f"round count must be >= 0, got {n}")
        if abs(self.factor - 1.0) <= _LINEAR_TOL:
            return 0.5 + n * self.drive
        w = self.drive / (1.0 - self.factor)
        return w + self.factor ** n * (0.5 - w)

    def steady(self) -> float | None:
        """Fixed point, or None when the recursion does not contract."""
        if self.factor >= 1.0 - _LINEAR_TOL:
            return None
        return self.drive / (1.0 - self.factor)


@dataclass(frozen=True)
class TransientModel:
    """Closed-form effective dynamics of the four collective moments."""

    u_x: GeometricRecursion
    u_p: GeometricRecursion
    big_u_x: GeometricRecursion
    big_u_p: GeometricRecursion

    # geometric factors
    @property
    def xi_x(self) -> float:
        return self.u_x.factor

    @property
    def xi_p(self) -> float:
        return self.u_p.factor

    @property
    def chi_x(self) -> float:
        return self.big_u_x.factor

    @property
    def chi_p(self) -> float:
        return self.big_u_p.factor

    # steady-state variances (None above threshold)
    @property
    def w_x(self) -> float | None:
        return self.u_x.steady()

    @property
    def w_p(self) -> float | None:
        return self.u_p.steady()

    @property
    def big_w_x(self) -> float | None:
        return self.big_u_x.steady()

    @property
    def big_w_p(self) -> float | None:
        return self.big_u_p.steady()

    def variances_at(self, n: int):
        """(var_ux, var_up, var_Ux, var_Up) after n round trips."""
        return (self.u_x.at(n), self.u_p.at(n), self.big_u_x.at(n), self.big_u_p.at(n))


def transient_model(params: DelayLineParams) -> TransientModel:
    """Evaluate the effective simultaneous-coupling model for ``params``."""
    eta2 = params.eta ** 2
    el = params.interface_loss
    keep2 = (1.0 - el) ** 2  # equals 1 - loss_tot
    t = params.t_a
    mix = (2.0 * t - 1.0) ** 2
    refill = 2.0 * t * (1.0 - t)
    noise_x = eta2 * el * (1.0 - el) + el
    noise_p = el * (1.0 - el) / eta2 + el
    return TransientModel(
        u_x=GeometricRecursion(eta2 * keep2 * mix, 0.5 * mix * noise_x + refill),
        u_p=GeometricRecursion(keep2 / eta2, 0.5 * noise_p),
        big_u_x=GeometricRecursion(eta2 * keep2, 0.5 * noise_x),
        big_u_p=GeometricRecursion(keep2 * mix / eta2, 0.5 * mix * noise_p + refill),
    )


def threshold_eta(loss_tot: float) -> float:
    """Squeeze factor above which the uniform-x moment grows without bound."""
    if not 0.0 <= loss_tot < 1.0:
        raise InvalidParameterError(f"loss_tot must lie in [0, 1), got {loss_tot}")
    return 1.0 / math.sqrt(1.0 - loss_tot)


def steady_state_k(params: DelayLineParams) -> float:
    """Steady-state K = 2 sqrt(w_x w_p) of the effective model."""
    model = transient_model(params)
    w_x, w_p = model.w_x, model.w_p
    if model.big_w_x is None or w_x is None or w_p is None:
        raise NoSteadyStateError(
            f"no steady state: eta = {params.eta} is at or above the divergence "
            f"threshold {threshold_eta(params.loss_tot):.6f}")
    return 2.0 * math.sqrt(w_x * w_p)


def optimal_k_bound(loss_tot: float) -> float:
    """Lower bound on the steady-state K reachable below threshold.

    Saturated by t_a = 1/2 with the squeeze factor approaching threshold;
    equals 1/sqrt(2) at zero loss.
    """
    if not 0.0 <= loss_tot < 1.0:
        raise InvalidParameterError(f"loss_tot must lie in [0, 1), got {loss_tot}")
    return math.sqrt(1.0 - math.sqrt(1.0 - loss_tot) / (2.0 - loss_tot))


def new_cavity_state(n_modes: int) -> QuadState:
    """Vacuum start for :func:`round_trip`: N pulses plus the two work slots."""
    return QuadState.vacuum(n_modes + 2)


def round_trip(state: QuadState, params: DelayLineParams, ring: CouplingRing) -> None:
    """Advance one full round trip, pulse by pulse.

    ``state`` holds the N cavity pulses in modes 0..N-1, the in-flight
    delayed tap in mode N, and a recycled scratch slot in mode N+1 (its
    content between rounds is irrelevant; it is reset to vacuum before each
    use). Pulse k is processed in order: loss, squeeze, loss, tap into the
    scratch slot at the first coupler, then absorption of the delayed tap of
    pulse k-1 (parity-flipped for an antiferromagnetic bond) at the second
    coupler. The spare output port of the second coupler is traced out by
    the next reset, and the fresh tap becomes the in-flight pulse.
    """
    n = params.n_modes
    if state.n_modes != n + 2:
        raise InvalidParameterError(
            f"state must hold n_modes + 2 = {n + 2} modes (see new_cavity_state), "
            f"got {state.n_modes}")
    el = params.interface_loss
    delay, scratch = n, n + 1
    for k in range(n):
        state.loss(el, modes=[k])
        state.squeeze(params.eta, modes=[k])
        state.loss(el, modes=[k])
        state.reset_to_vacuum(scratch)
        state.beamsplitter(k, scratch, params.t_a)  # fresh tap
        if ring.signs[(k - 1) % n] < 0:
            state.phase_flip(delay)
        state.beamsplitter(k, delay, params.t_a)    # inject the delayed tap
        delay, scratch = scratch, delay
    if delay != n:
        state.swap_modes(delay, n)  # pin the in-flight tap at slot N between rounds


def gauge_folded_vectors(n: int, ring: CouplingRing):
    """Characteristic vectors with the ring's gauge flips folded in.

    Evaluating the quadratic form with these on the raw state equals
    evaluating the plain vectors on the gauge-flipped state.
    """
    gauge = seam_gauge(ring)
    return tuple(v * gauge for v in characteristic_vectors(n))


def simulate(params: DelayLineParams, ring: CouplingRing, n_rounds: int,
             record_every: int = 1, stop_at_steady: bool = False,
             guard: float = DIVERGENCE_GUARD) -> Trajectory:
    """Run the sequential delay-line dynamics from vacuum.

    Records the collective variances and K of the N-pulse cavity marginal
    (the in-flight tap is traced out) every ``record_every`` rounds. A run
    is flagged divergent, and stops, once any single-mode variance exceeds
    ``guard``. With ``stop_at_steady`` the run ends as soon as K changes by
    less than the steady-state threshold between consecutive rounds.
    """
    if ring.n_modes != params.n_modes:
        raise InvalidParameterError(
            f"ring has {ring.n_modes} bonds but params declare {params.n_modes} modes")
    if n_rounds < 1:
        raise InvalidParameterError(f"n_rounds must be >= 1, got {n_rounds}")
    n = params.n_modes
    vectors = gauge_folded_vectors(n, ring) if n % 2 == 0 else None
    state = new_cavity_state(n)
    recorder = TrajectoryRecorder(record_every)
    recorder.observe(0, _cavity_moments(state, n, vectors), False)
    for rnd in range(1, n_rounds + 1):
        round_trip(state, params, ring)
        diverged = _cavity_guard(state, n) > guard
        recorder.observe(rnd, _cavity_moments(state, n, vectors), diverged)
        if diverged or (stop_at_steady and recorder.steady):
            break
    marginal = state.copy()
    marginal.discard([n, n + 1])
    return recorder.build(marginal)


def _cavity_guard(state: QuadState, n: int) -> float:
    return float(max(state.sigma_x.diagonal()[:n].max(),
                     state.sigma_p.diagonal()[:n].max()))


def _cavity_moments(state, n, vectors):
    if vectors is None:
        return None
    sx = state.sigma_x[:n, :n]
    sp = state.sigma_p[:n, :n]
    u_x, u_p, big_x, big_p = vectors
    var_ux = float(u_x @ sx @ u_x)
    var_up = float(u_p @ sp @ u_p)
    var_bx = float(big_x @ sx @ big_x)
    var_bp = float(big_p @ sp @ big_p)
    return CharacteristicMoments(var_ux, var_up, var_bx, var_bp,
                                 float(2.0 * np.sqrt(var_ux * var_up)))
