"""Two-block Gaussian state engine for x/p-uncorrelated multimode optics.

Units are dimensionless quadratures with hbar = 1, so a vacuum mode has
variance 1/2 in both x and p. None of the maps provided here ever couple an
x quadrature to a p quadrature, which lets a state be stored as two
symmetric N x N second-moment blocks (x-x and p-p) plus two mean vectors
instead of a full 2N x 2N covariance matrix. Zero x-p correlation is thus a
structural invariant rather than an emergent property, and it halves the
cost of every update.

Operations mutate the state in place and return None; a state instance is
meant to be owned by a single simulation loop. Use :meth:`QuadState.copy`
to branch. Blocks are re-symmetrized after any update that can introduce
floating-point asymmetry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateMeasurementError,
    InvalidOperationError,
    InvalidParameterError,
    PhysicalityError,
)

#: Quadrature variance of a vacuum mode.
VACUUM_VARIANCE = 0.5

#: Below this measured-quadrature variance, homodyne conditioning is refused.
DEGENERATE_VARIANCE = 1e-15

#: Slack allowed on the symplectic-eigenvalue bound nu >= 1/2.
PHYSICALITY_TOL = 1e-9

QUADRATURES = ("x", "p")


@dataclass(frozen=True)
class HomodyneOutcome:
    """Record of a single homodyne detection.

    ``conditional_variance`` is the variance of the measured quadrature just
    before detection; ``value`` is the detected outcome.
    """

    mode: int
    quadrature: str
    value: float
    conditional_variance: float


def _check_quadrature(quadrature: str) -> str:
    if quadrature not in QUADRATURES:
        raise InvalidParameterError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    return quadrature


class QuadState:
    """N-mode Gaussian state with uncorrelated x and p blocks."""

    __slots__ = ("sigma_x", "sigma_p", "mean_x", "mean_p")

    def __init__(self, sigma_x, sigma_p, mean_x=None, mean_p=None):
        sx = np.array(sigma_x, dtype=float)
        sp = np.array(sigma_p, dtype=float)
        if sx.ndim != 2 or sx.shape[0] != sx.shape[1]:
            raise InvalidParameterError(f"sigma_x must be square, got shape {sx.shape}")
        if sp.shape != sx.shape:
            raise InvalidParameterError(
                f"sigma_p shape {sp.shape} does not match sigma_x shape {sx.shape}")
        n = sx.shape[0]
        if n < 1:
            raise InvalidParameterError("state needs at least one mode")
        self.sigma_x = 0.5 * (sx + sx.T)
        self.sigma_p = 0.5 * (sp + sp.T)
        self.mean_x = np.zeros(n) if mean_x is None else np.array(mean_x, dtype=float)
        self.mean_p = np.zeros(n) if mean_p is None else np.array(mean_p, dtype=float)
        if self.mean_x.shape != (n,) or self.mean_p.shape != (n,):
            raise InvalidParameterError("mean vectors must have length n_modes")

    # ------------------------------------------------------------------
    # construction / bookkeeping
    # ------------------------------------------------------------------

    @classmethod
    def vacuum(cls, n: int) -> "QuadState":
        """The n-mode vacuum: both blocks (1/2) * identity, zero means."""
        if n < 1:
            raise InvalidParameterError(f"n_modes must be >= 1, got {n}")
        eye = VACUUM_VARIANCE * np.eye(n)
        return cls(eye, eye.copy())

    @property
    def n_modes(self) -> int:
        return self.sigma_x.shape[0]

    def copy(self) -> "QuadState":
        dup = QuadState.__new__(QuadState)
        dup.sigma_x = self.sigma_x.copy()
        dup.sigma_p = self.sigma_p.copy()
        dup.mean_x = self.mean_x.copy()
        dup.mean_p = self.mean_p.copy()
        return dup

    def block(self, quadrature: str) -> np.ndarray:
        return self.sigma_x if _check_quadrature(quadrature) == "x" else self.sigma_p

    def mean(self, quadrature: str) -> np.ndarray:
        return self.mean_x if _check_quadrature(quadrature) == "x" else self.mean_p

    def _check_mode(self, k: int) -> int:
        k = int(k)
        if not 0 <= k < self.n_modes:
            raise IndexError(f"mode index {k} out of range for {self.n_modes} modes")
        return k

    def _symmetrize(self) -> None:
        self.sigma_x = 0.5 * (self.sigma_x + self.sigma_x.T)
        self.sigma_p = 0.5 * (self.sigma_p + self.sigma_p.T)

    # ------------------------------------------------------------------
    # elementary maps
    # ------------------------------------------------------------------

    def squeeze(self, eta: float, modes: Sequence[int] | None = None) -> None:
        """Apply x -> eta x, p -> p / eta on the given modes (default: all)."""
        eta = float(eta)
        if not eta > 0.0:
            raise InvalidParameterError(f"eta must be > 0, got {eta}")
        if modes is None:
            self.sigma_x *= eta * eta
            self.sigma_p /= eta * eta
            self.mean_x *= eta
            self.mean_p /= eta
            return
        ks = [self._check_mode(k) for k in modes]
        for mat, factor in ((self.sigma_x, eta), (self.sigma_p, 1.0 / eta)):
            mat[ks, :] *= factor
            mat[:, ks] *= factor
        self.mean_x[ks] *= eta
        self.mean_p[ks] /= eta

    def loss(self, loss: float, modes: Sequence[int] | None = None) -> None:
        """Mix the given modes (default: all) with vacuum through a loss channel.

        Each block obeys sigma -> (1-loss) sigma + (loss/2) I on the lossy
        modes; means scale by sqrt(1-loss).
        """
        loss = float(loss)
        if not 0.0 <= loss < 1.0:
            raise InvalidParameterError(f"loss must lie in [0, 1), got {loss}")
        keep = 1.0 - loss
        root = math.sqrt(keep)
        if modes is None:
            for mat in (self.sigma_x, self.sigma_p):
                mat *= keep
                mat[np.diag_indices_from(mat)] += 0.5 * loss
            self.mean_x *= root
            self.mean_p *= root
            return
        ks = [self._check_mode(k) for k in modes]
        for mat in (self.sigma_x, self.sigma_p):
            mat[ks, :] *= root
            mat[:, ks] *= root
            mat[ks, ks] += 0.5 * loss
        self.mean_x[ks] *= root
        self.mean_p[ks] *= root

    def beamsplitter(self, i: int, j: int, transmissivity: float) -> None:
        """Mix modes i and j on a real beamsplitter.

        Port i receives sqrt(T) of mode i plus sqrt(1-T) of mode j; port j
        receives sqrt(1-T) of mode i minus sqrt(T) of mode j. The identical
        orthogonal mixing acts on the x and the p quadratures.
        """
        i = self._check_mode(i)
        j = self._check_mode(j)
        if i == j:
            raise IndexError("beamsplitter needs two distinct modes")
        t = float(transmissivity)
        if not 0.0 <= t <= 1.0:
            raise InvalidParameterError(f"transmissivity must lie in [0, 1], got {t}")
        a = math.sqrt(t)
        b = math.sqrt(1.0 - t)
        for mat in (self.sigma_x, self.sigma_p):
            ri = a * mat[i, :] + b * mat[j, :]
            rj = b * mat[i, :] - a * mat[j, :]
            mat[i, :] = ri
            mat[j, :] = rj
            ci = a * mat[:, i] + b * mat[:, j]
            cj = b * mat[:, i] - a * mat[:, j]
            mat[:, i] = ci
            mat[:, j] = cj
        for m in (self.mean_x, self.mean_p):
            m[i], m[j] = a * m[i] + b * m[j], b * m[i] - a * m[j]
        self._symmetrize()

    def phase_flip(self, k: int) -> None:
        """Negate mode k's quadratures: x_k -> -x_k, p_k -> -p_k."""
        k = self._check_mode(k)
        for mat in (self.sigma_x, self.sigma_p):
            mat[k, :] *= -1.0
            mat[:, k] *= -1.0
        self.mean_x[k] *= -1.0
        self.mean_p[k] *= -1.0

    def displace(self, dx=None, dp=None) -> None:
        """Shift the mean vectors; covariances are untouched."""
        if dx is not None:
            self.mean_x += np.asarray(dx, dtype=float)
        if dp is not None:
            self.mean_p += np.asarray(dp, dtype=float)

    def attach_vacuum(self, count: int = 1) -> None:
        """Append ``count`` vacuum modes after the existing ones."""
        count = int(count)
        if count < 1:
            raise InvalidParameterError(f"count must be >= 1, got {count}")
        n = self.n_modes
        for name in ("sigma_x", "sigma_p"):
            old = getattr(self, name)
            new = np.zeros((n + count, n + count))
            new[:n, :n] = old
            new[range(n, n + count), range(n, n + count)] = VACUUM_VARIANCE
            setattr(self, name, new)
        self.mean_x = np.concatenate([self.mean_x, np.zeros(count)])
        self.mean_p = np.concatenate([self.mean_p, np.zeros(count)])

    def discard(self, modes: Iterable[int]) -> None:
        """Trace out the given modes (delete their rows/columns)."""
        ks = sorted({self._check_mode(k) for k in modes})
        if not ks:
            raise InvalidParameterError("discard needs at least one mode")
        if len(ks) >= self.n_modes:
            raise InvalidOperationError("cannot discard every mode of a state")
        self.sigma_x = np.delete(np.delete(self.sigma_x, ks, axis=0), ks, axis=1)
        self.sigma_p = np.delete(np.delete(self.sigma_p, ks, axis=0), ks, axis=1)
        self.mean_x = np.delete(self.mean_x, ks)
        self.mean_p = np.delete(self.mean_p, ks)

    def homodyne(self, mode: int, quadrature: str,
                 outcome: float | None = None) -> HomodyneOutcome:
        """Measure one quadrature of one mode and condition the remainder.

        The measured block is updated by the Schur complement
        sigma' = sigma_rest - c c^T / v; the conjugate block of the measured
        mode is simply traced out (it is uncorrelated with the rest by the
        zero x-p invariant, and its anti-squeezed noise never couples back).
        The measured mode is removed from the state.

        ``outcome=None`` conditions on the prior mean of the measured
        quadrature, which leaves all means unchanged; the conditional
        covariance never depends on the outcome.
        """
        mode = self._check_mode(mode)
        quadrature = _check_quadrature(quadrature)
        if self.n_modes < 2:
            raise InvalidOperationError("cannot measure away the only mode of a state")
        meas = self.sigma_x if quadrature == "x" else self.sigma_p
        mean_m = self.mean_x if quadrature == "x" else self.mean_p
        v = float(meas[mode, mode])
        if v <= DEGENERATE_VARIANCE:
            raise DegenerateMeasurementError(
                f"{quadrature}-variance of mode {mode} is {v:.3e}; state is over-conditioned")
        prior_mean = float(mean_m[mode])
        if outcome is None:
            y = prior_mean
        else:
            y = float(outcome)
            if not math.isfinite(y):
                raise InvalidParameterError(f"homodyne outcome must be finite, got {y}")
        keep = np.delete(np.arange(self.n_modes), mode)
        c = meas[keep, mode]
        reduced = meas[np.ix_(keep, keep)] - np.outer(c, c) / v
        new_mean = mean_m[keep] + c * ((y - prior_mean) / v)
        if quadrature == "x":
            self.sigma_x = reduced
            self.mean_x = new_mean
            self.sigma_p = self.sigma_p[np.ix_(keep, keep)]
            self.mean_p = self.mean_p[keep]
        else:
            self.sigma_p = reduced
            self.mean_p = new_mean
            self.sigma_x = self.sigma_x[np.ix_(keep, keep)]
            self.mean_x = self.mean_x[keep]
        self._symmetrize()
        return HomodyneOutcome(mode=mode, quadrature=quadrature, value=y,
                               conditional_variance=v)

    # ------------------------------------------------------------------
    # slot-recycling variants (equivalent to homodyne/discard + attach_vacuum
    # but without changing the array sizes; used by the simulation loops)
    # ------------------------------------------------------------------

    def reset_to_vacuum(self, mode: int) -> None:
        """Trace out one mode and replace it with a fresh vacuum mode in place."""
        mode = self._check_mode(mode)
        for mat in (self.sigma_x, self.sigma_p):
            mat[mode, :] = 0.0
            mat[:, mode] = 0.0
            mat[mode, mode] = VACUUM_VARIANCE
        self.mean_x[mode] = 0.0
        self.mean_p[mode] = 0.0

    def measure_slot(self, mode: int, quadrature: str,
                     outcome: float | None = None) -> HomodyneOutcome:
        """Homodyne a scratch slot without shrinking the state.

        Applies the same conditioning as :meth:`homodyne` but leaves the
        measured mode in place as a depleted slot (zero rows in the measured
        block, stale conjugate rows). The caller must
        :meth:`reset_to_vacuum` the slot before using it again.
        """
        mode = self._check_mode(mode)
        quadrature = _check_quadrature(quadrature)
        meas = self.sigma_x if quadrature == "x" else self.sigma_p
        mean_m = self.mean_x if quadrature == "x" else self.mean_p
        v = float(meas[mode, mode])
        if v <= DEGENERATE_VARIANCE:
            raise DegenerateMeasurementError(
                f"{quadrature}-variance of mode {mode} is {v:.3e}; state is over-conditioned")
        prior_mean = float(mean_m[mode])
        if outcome is None:
            y = prior_mean
        else:
            y = float(outcome)
            if not math.isfinite(y):
                raise InvalidParameterError(f"homodyne outcome must be finite, got {y}")
        c = meas[:, mode].copy()
        meas -= np.outer(c, c / v)
        mean_m += c * ((y - prior_mean) / v)
        # the measured slot is now fully conditioned away: exact zeros keep
        # later resets from leaking residue
        meas[mode, :] = 0.0
        meas[:, mode] = 0.0
        mean_m[mode] = 0.0
        return HomodyneOutcome(mode=mode, quadrature=quadrature, value=y,
                               conditional_variance=v)

    def swap_modes(self, i: int, j: int) -> None:
        """Exchange the labels of two modes."""
        i = self._check_mode(i)
        j = self._check_mode(j)
        if i == j:
            return
        for mat in (self.sigma_x, self.sigma_p):
            mat[[i, j], :] = mat[[j, i], :]
            mat[:, [i, j]] = mat[:, [j, i]]
        for m in (self.mean_x, self.mean_p):
            m[[i, j]] = m[[j, i]]

    # ------------------------------------------------------------------
    # diagnostics
    # ------------------------------------------------------------------

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Square roots of the eigenvalues of sigma_x @ sigma_p, ascending.

        With vanishing x-p correlations the symplectic spectrum of the full
        covariance matrix reduces to exactly this; the product is evaluated
        in the symmetrized form sqrt(sigma_x) sigma_p sqrt(sigma_x) for
        numerical stability.
        """
        wx, vx = np.linalg.eigh(self.sigma_x)
        if wx[0] <= 0.0:
            raise PhysicalityError(
                f"sigma_x is not positive definite (min eigenvalue {wx[0]:.3e})")
        wp = np.linalg.eigvalsh(self.sigma_p)
        if wp[0] <= 0.0:
            raise PhysicalityError(
                f"sigma_p is not positive definite (min eigenvalue {wp[0]:.3e})")
        root = (vx * np.sqrt(wx)) @ vx.T
        product = root @ self.sigma_p @ root
        evals = np.linalg.eigvalsh(0.5 * (product + product.T))
        return np.sqrt(np.clip(evals, 0.0, None))

    def min_symplectic_eigenvalue(self) -> float:
        return float(self.symplectic_eigenvalues()[0])

    def assert_physical(self, tol: float = PHYSICALITY_TOL) -> None:
        """Raise unless every symplectic eigenvalue is >= 1/2 - tol."""
        nu = self.min_symplectic_eigenvalue()
        if nu < VACUUM_VARIANCE - tol:
            raise PhysicalityError(
                f"min symplectic eigenvalue {nu:.12g} violates the bound 1/2 - {tol:g}")

    def max_diagonal_variance(self) -> float:
        """Largest single-mode variance across both blocks (divergence guard)."""
        return float(max(self.sigma_x.diagonal().max(), self.sigma_p.diagonal().max()))
