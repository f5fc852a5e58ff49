"""Independent dense-covariance reference engine for cross-checking.

Keeps the full 2N x 2N covariance matrix in interleaved (x1, p1, x2, p2, ...)
ordering and applies textbook Gaussian channel and measurement formulas,
including the x-p cross blocks the production engine assumes away. Written
against the standard formulas only; deliberately shares no code with the
two-block engine.
"""

from __future__ import annotations

import numpy as np


def _xi(k):
    return 2 * k


def _pi(k):
    return 2 * k + 1


class FullGaussianState:
    def __init__(self, n):
        self.cov = 0.5 * np.eye(2 * n)
        self.mean = np.zeros(2 * n)

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2

    def copy(self):
        dup = FullGaussianState.__new__(FullGaussianState)
        dup.cov = self.cov.copy()
        dup.mean = self.mean.copy()
        return dup

    def _apply_symplectic(self, s):
        self.cov = s @ self.cov @ s.T
        self.mean = s @ self.mean

    def squeeze(self, eta, modes=None):
        n = self.n_modes
        modes = range(n) if modes is None else modes
        s = np.eye(2 * n)
        for k in modes:
            s[_xi(k), _xi(k)] = eta
            s[_pi(k), _pi(k)] = 1.0 / eta
        self._apply_symplectic(s)

    def beamsplitter(self, i, j, t):
        n = self.n_modes
        a, b = np.sqrt(t), np.sqrt(1.0 - t)
        s = np.eye(2 * n)
        for pick in (_xi, _pi):
            s[pick(i), pick(i)] = a
            s[pick(i), pick(j)] = b
            s[pick(j), pick(i)] = b
            s[pick(j), pick(j)] = -a
        self._apply_symplectic(s)

    def phase_flip(self, k):
        n = self.n_modes
        s = np.eye(2 * n)
        s[_xi(k), _xi(k)] = -1.0
        s[_pi(k), _pi(k)] = -1.0
        self._apply_symplectic(s)

    def attach_vacuum(self, count=1):
        n2 = self.cov.shape[0]
        cov = 0.5 * np.eye(n2 + 2 * count)
        cov[:n2, :n2] = self.cov
        self.cov = cov
        self.mean = np.concatenate([self.mean, np.zeros(2 * count)])

    def discard(self, modes):
        drop = sorted({m for k in modes for m in (_xi(k), _pi(k))})
        self.cov = np.delete(np.delete(self.cov, drop, axis=0), drop, axis=1)
        self.mean = np.delete(self.mean, drop)

    def loss(self, loss, modes=None):
        # modelled literally as a beamsplitter against a vacuum ancilla that
        # is traced out afterwards (transmissivity 1 - loss)
        n = self.n_modes
        modes = list(range(n)) if modes is None else list(modes)
        for k in modes:
            self.attach_vacuum()
            self.beamsplitter(k, self.n_modes - 1, 1.0 - loss)
            self.discard([self.n_modes - 1])

    def homodyne(self, mode, quadrature, outcome=None):
        """Measure x or p of one mode; Schur-complement update, mode removed."""
        meas = _xi(mode) if quadrature == "x" else _pi(mode)
        v = self.cov[meas, meas]
        y = self.mean[meas] if outcome is None else outcome
        keep = [i for i in range(self.cov.shape[0]) if i not in (_xi(mode), _pi(mode))]
        c = self.cov[keep, meas]
        cov = self.cov[np.ix_(keep, keep)] - np.outer(c, c) / v
        mean = self.mean[keep] + c * (y - self.mean[meas]) / v
        self.cov, self.mean = cov, mean
        return y, v

    def displace(self, dx=None, dp=None):
        n = self.n_modes
        if dx is not None:
            self.mean[[_xi(k) for k in range(n)]] += np.asarray(dx, dtype=float)
        if dp is not None:
            self.mean[[_pi(k) for k in range(n)]] += np.asarray(dp, dtype=float)

    # -- extraction ------------------------------------------------------

    def blocks(self):
        """(sigma_x, sigma_p, mean_x, mean_p, max |x-p cross correlation|)."""
        n = self.n_modes
        xs = [_xi(k) for k in range(n)]
        ps = [_pi(k) for k in range(n)]
        cross = self.cov[np.ix_(xs, ps)]
        return (self.cov[np.ix_(xs, xs)], self.cov[np.ix_(ps, ps)],
                self.mean[xs], self.mean[ps], float(np.max(np.abs(cross))))

    def symplectic_eigenvalues(self):
        """Moduli of the eigenvalues of i Omega sigma (each appears twice)."""
        n = self.n_modes
        omega = np.zeros((2 * n, 2 * n))
        for k in range(n):
            omega[_xi(k), _pi(k)] = 1.0
            omega[_pi(k), _xi(k)] = -1.0
        ev = np.linalg.eigvals(1j * omega @ self.cov)
        return np.sort(np.abs(ev))[::2]
