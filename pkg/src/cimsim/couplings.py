"""Nearest-neighbor coupling parities on a 1D ring.

Modes are indexed 0..N-1; ``signs[k]`` is the parity (+1 ferromagnetic,
-1 antiferromagnetic) of the bond between modes k and (k+1) % N, so the
last entry closes the ring. The ring is frustrated exactly when the product
of all parities S* is -1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import GaugeImpossibleError, InvalidParameterError, SingularBasisError

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class CouplingRing:
    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) < 2:
            raise InvalidParameterError(f"a ring needs at least 2 bonds, got {len(signs)}")
        if any(s not in (1, -1) for s in signs):
            raise InvalidParameterError(f"coupling signs must be +1 or -1, got {signs}")
        object.__setattr__(self, "signs", signs)

    @property
    def n_modes(self) -> int:
        return len(self.signs)

    @property
    def s_star(self) -> int:
        """Product of all bond parities; -1 indicates frustration."""
        return int(np.prod(self.signs))

    def is_ferromagnetic(self) -> bool:
        return all(s == 1 for s in self.signs)


def ring_from_signs(signs: Sequence[int]) -> CouplingRing:
    """Build a ring from an explicit +/-1 parity list."""
    return CouplingRing(tuple(signs))


def ferromagnetic_ring(n: int) -> CouplingRing:
    return CouplingRing((1,) * n)


def random_ring(n: int, target_s_star: int = 1, seed: int = 0) -> CouplingRing:
    """Uniformly random parities conditioned on the ring's total parity.

    Samples the first n-1 bonds freely and fixes the closing bond to hit
    ``target_s_star``; deterministic in ``seed``.
    """
    if n < 2:
        raise InvalidParameterError(f"a ring needs at least 2 bonds, got {n}")
    if target_s_star not in (1, -1):
        raise InvalidParameterError(f"target_s_star must be +1 or -1, got {target_s_star}")
    rng = np.random.default_rng(int(seed))
    free = rng.choice((1, -1), size=n - 1)
    last = target_s_star * int(np.prod(free))
    return CouplingRing(tuple(int(s) for s in free) + (last,))


def path_product(ring: CouplingRing, k: int, ell: int) -> int:
    """Product of bond parities along the ascending path from k to ell.

    Equals +1 for k == ell (empty product) and never wraps around the ring.
    """
    n = ring.n_modes
    if not (0 <= k < n and 0 <= ell < n):
        raise IndexError(f"mode indices ({k}, {ell}) out of range for {n} modes")
    lo, hi = min(k, ell), max(k, ell)
    return int(np.prod(ring.signs[lo:hi])) if hi > lo else 1


def path_product_matrix(ring: CouplingRing) -> np.ndarray:
    """Matrix of all path products S[k, ell]."""
    n = ring.n_modes
    # cumulative products give S[0, k]; S[k, ell] = S[0, k] * S[0, ell]
    # because the shared prefix squares away.
    prefix = np.concatenate([[1], np.cumprod(ring.signs[:-1])])
    return np.outer(prefix, prefix).astype(int)


def gauge_signs(ring: CouplingRing) -> np.ndarray:
    """Local sign flips that make an unfrustrated ring all-ferromagnetic.

    Returns the vector of path products from mode 0; flipping every mode
    where the entry is -1 maps the couplings to s_k = +1 for all k.
    """
    if ring.s_star != 1:
        raise GaugeImpossibleError(
            "frustration (S* = -1) cannot be removed by local phase flips")
    return seam_gauge(ring)


def seam_gauge(ring: CouplingRing) -> np.ndarray:
    """Flip pattern making all bonds +1 except the closing bond, which becomes S*.

    For S* = +1 this coincides with :func:`gauge_signs`; for frustrated rings
    it concentrates the single unavoidable -1 bond at the ring seam, which is
    the form assumed by the correlation-model fit.
    """
    return np.concatenate([[1], np.cumprod(ring.signs[:-1])]).astype(float)


def apply_gauge(state, gauge: np.ndarray) -> None:
    """Phase-flip every mode whose gauge entry is -1 (in place)."""
    for k, g in enumerate(gauge):
        if g < 0:
            state.phase_flip(k)


@dataclass(frozen=True)
class BasisMatrix:
    """The change of basis from mode amplitudes to pairwise-difference readouts.

    Row k reads out (x_k - s_k x_{k+1}) / sqrt(2); the matrix is invertible
    exactly when the ring is frustrated (S* = -1).
    """

    matrix: np.ndarray
    ring: CouplingRing = field(repr=False)

    @property
    def invertible(self) -> bool:
        return self.ring.s_star == -1


def build_m(ring: CouplingRing) -> BasisMatrix:
    n = ring.n_modes
    m = np.zeros((n, n))
    for k in range(n):
        m[k, k] = 1.0 / _SQRT2
        m[k, (k + 1) % n] = -ring.signs[k] / _SQRT2
    return BasisMatrix(matrix=m, ring=ring)


def invert_m(basis: BasisMatrix) -> np.ndarray:
    """Closed-form inverse of the readout basis matrix.

    Entry (k, ell) is +S[k, ell]/sqrt(2) above the diagonal, -S[k, ell]/sqrt(2)
    below it, and 1/sqrt(2) on it; only defined for frustrated rings.
    """
    if not basis.invertible:
        raise SingularBasisError(
            "readout basis is singular for S* = +1; mean inference requires frustration")
    s = path_product_matrix(basis.ring).astype(float)
    inv = np.triu(s, 1) - np.tril(s, -1) + np.eye(basis.ring.n_modes)
    return inv / _SQRT2
