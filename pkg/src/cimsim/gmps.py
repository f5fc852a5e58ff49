"""Lossless Gaussian matrix-product-state reference construction (scheme C).

An N-mode ring state is assembled from N identical three-mode building
blocks, each holding two auxiliary modes and one output mode. Adjacent
blocks are glued by projecting auxiliary pairs onto strongly-squeezed
two-mode (EPR) states; the projection is a per-quadrature Schur complement

    sigma_out = sigma_a - sigma_ab^T (sigma_b + theta sigma_epr theta)^-1 sigma_ab,

where theta flips the sign of every second auxiliary mode. Infinite EPR
squeezing is replaced by a large finite variance ratio z (squeezed variance
1/(2z), anti-squeezed z/2), keeping the computation a plain linear solve
with controllable conditioning; moments converge to their z -> infinity
values like 1/z.

The construction gives closed-form collective moments: the extremal
variances are 1/(2r) and r/2 whatever s is, so the entanglement measure is
exactly K = 1/r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, NumericalConditioningError
from .gaussian import QuadState

_CONDITION_LIMIT = 1e14

# Orientation of the EPR pairs used for the gluing projection: the x
# quadratures of a pair are anti-correlated and the p quadratures
# correlated. Combined with the theta sign flip this makes the output
# x-x correlations ferromagnetic (positive).
_EPR_X_SIGN = -1.0


@dataclass(frozen=True)
class GmpsParams:
    """Building-block parameters (s, r), ring size, and EPR variance ratio z.

    Physicality of the blocks requires r >= 1 and s >= (r + 1) / 2, which is
    also exactly the condition keeping every square root in the block
    entries real.
    """

    s: float
    r: float
    n_modes: int
    epr_squeeze: float = 1e6

    def __post_init__(self):
        if self.r < 1.0:
            raise InvalidParameterError(
                f"building block needs r >= 1, got r = {self.r}")
        if self.s < (self.r + 1.0) / 2.0:
            raise InvalidParameterError(
                f"building block needs s >= (r + 1)/2 = {(self.r + 1.0) / 2.0}, "
                f"got s = {self.s}")
        if self.n_modes < 4 or self.n_modes % 2:
            raise InvalidParameterError(
                f"n_modes must be an even integer >= 4, got {self.n_modes}")
        if self.epr_squeeze < 1.0:
            raise InvalidParameterError(
                f"epr_squeeze must be >= 1, got {self.epr_squeeze}")


def block_entries(s: float, r: float):
    """Closed-form off-diagonal entries (t_plus, t_minus, u_plus, u_minus).

    All square-root arguments are nonnegative exactly when r >= 1 and
    s >= (r + 1)/2.
    """
    GmpsParams(s=s, r=r, n_modes=4)  # reuse the domain validation
    disc = 16.0 * s ** 4 - 8.0 * s ** 2 * (1.0 + r ** 2) + (r ** 2 - 1.0) ** 2
    root = math.sqrt(max(disc, 0.0))
    t_plus = (r ** 2 - 1.0 + root) / (4.0 * s)
    t_minus = (r ** 2 - 1.0 - root) / (4.0 * s)
    scale = 0.25 * math.sqrt((r ** 2 - 1.0) / (s * r)) if r > 1.0 else 0.0
    lo = math.sqrt(max((r - 2.0 * s) ** 2 - 1.0, 0.0))
    hi = math.sqrt((r + 2.0 * s) ** 2 - 1.0)
    u_plus = scale * (lo + hi)
    u_minus = scale * (lo - hi)
    return t_plus, t_minus, u_plus, u_minus


def building_block(s: float, r: float):
    """Three-mode covariance blocks (sigma_x, sigma_p), modes (b1, b2, a)."""
    t_plus, t_minus, u_plus, u_minus = block_entries(s, r)

    def block(t, u):
        return 0.5 * np.array([[s, t, u],
                               [t, s, u],
                               [u, u, r]])

    return block(t_plus, u_plus), block(t_minus, u_minus)


def analytic_moments(r: float):
    """Exact collective moments (var_u, var_U, K) = (1/(2r), r/2, 1/r)."""
    if r < 1.0:
        raise InvalidParameterError(f"requires r >= 1, got {r}")
    return 1.0 / (2.0 * r), r / 2.0, 1.0 / r


def gmps_state(params: GmpsParams) -> QuadState:
    """Assemble the N-mode output state by EPR projection of the aux modes.

    Auxiliary modes are ordered (b1_0, b2_0, b1_1, b2_1, ...); the EPR pair
    k links b2_k with b1_{k+1} around the ring.
    """
    n = params.n_modes
    z = params.epr_squeeze
    t_plus, t_minus, u_plus, u_minus = block_entries(params.s, params.r)

    diag = (z + 1.0 / z) / 4.0
    cross = (z - 1.0 / z) / 4.0
    theta = np.tile([1.0, -1.0], n)

    out = {}
    for quad, t, u, epr_sign in (("x", t_plus, u_plus, _EPR_X_SIGN),
                                 ("p", t_minus, u_minus, -_EPR_X_SIGN)):
        sigma_b = 0.5 * params.s * np.eye(2 * n)
        sigma_ab = np.zeros((2 * n, n))
        for k in range(n):
            b1, b2 = 2 * k, 2 * k + 1
            sigma_b[b1, b2] = sigma_b[b2, b1] = 0.5 * t
            sigma_ab[b1, k] = sigma_ab[b2, k] = 0.5 * u
        sigma_a = 0.5 * params.r * np.eye(n)

        epr = diag * np.eye(2 * n)
        for k in range(n):
            i, j = 2 * k + 1, (2 * k + 2) % (2 * n)
            epr[i, j] = epr[j, i] = epr_sign * cross
        inner = sigma_b + (theta[:, None] * epr) * theta[None, :]
        if np.linalg.cond(inner) > _CONDITION_LIMIT:
            raise NumericalConditioningError(
                "EPR projection solve is too ill-conditioned; reduce epr_squeeze")
        out[quad] = sigma_a - sigma_ab.T @ np.linalg.solve(inner, sigma_ab)

    return QuadState(out["x"], out["p"])
