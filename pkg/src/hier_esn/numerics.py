"""Shared numerical kernels.

Every random draw in the package goes through :class:`SeededRng`, a thin
wrapper around numpy's PCG64 bit generator. Child seeds for parallel work are
derived with :func:`derive_seed`, a BLAKE2b hash of the parent seed and a
label path, so a whole experiment replays from one root seed.
"""

from __future__ import annotations

import hashlib
import logging
import struct

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, DegenerateInputError, DimensionError, SingularSystemError

log = logging.getLogger(__name__)

SEED_MASK = (1 << 64) - 1


def derive_seed(parent: int, *labels) -> int:
    """Split a child seed off ``parent``.

    ``child = blake2b(parent || label_1 || ... )`` truncated to 64 bits. Labels
    may be ints or strings; the rule is stable across platforms and runs.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<Q", int(parent) & SEED_MASK))
    for label in labels:
        if isinstance(label, (int, np.integer)):
            h.update(b"i" + struct.pack("<q", int(label)))
        else:
            h.update(b"s" + str(label).encode("utf-8"))
        h.update(b"\x00")
    return struct.unpack("<Q", h.digest())[0]


class SeededRng:
    """Single-owner seeded generator (PCG64).

    Do not share an instance between threads; call :meth:`child` to get an
    independent stream instead.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & SEED_MASK
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def uniform(self, low=0.0, high=1.0, size=None):
        """Draws in ``[low, high)``."""
        return self._gen.uniform(low, high, size)

    def unit_interval_open_left(self, size=None):
        """Draws in ``(0, 1]``."""
        return 1.0 - self._gen.random(size)

    def random(self, size=None):
        return self._gen.random(size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def choice(self, n: int, size: int, replace: bool = True):
        return self._gen.choice(n, size=size, replace=replace)

    def child(self, *labels) -> "SeededRng":
        return SeededRng(derive_seed(self.seed, *labels))


def _as_square(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


GROW_EVERY = 10


def _arnoldi_radius(m, v0, tol, max_iter, krylov_dim):
    """Largest |eigenvalue| by explicitly restarted Arnoldi iteration.

    Each cycle is ``krylov_dim`` power-iteration steps with Gram-Schmidt
    orthogonalisation; the Ritz values of the small Hessenberg matrix resolve
    complex-conjugate dominant pairs, which a plain power iteration cannot.
    The restart vector is the real span of the four leading Ritz vectors; the
    subspace grows by half every ``GROW_EVERY`` restarts so that clustered
    leading moduli (typical of large random matrices) are still resolved.
    """
    n = m.shape[0]
    k = min(krylov_dim, n)
    v = v0
    theta = 0.0
    for it in range(max_iter):
        if it and it % GROW_EVERY == 0:
            k = min(n, k + k // 2)
        basis = np.zeros((n, k + 1))
        hess = np.zeros((k + 1, k))
        basis[:, 0] = v / np.linalg.norm(v)
        size = k
        breakdown = False
        for j in range(k):
            w = m @ basis[:, j]
            for _ in range(2):  # reorthogonalise once
                h = basis[:, : j + 1].T @ w
                w -= basis[:, : j + 1] @ h
                hess[: j + 1, j] += h
            hess[j + 1, j] = np.linalg.norm(w)
            scale = max(1.0, np.abs(hess[: j + 1, : j + 1]).max())
            if hess[j + 1, j] <= 1e-14 * scale:
                size = j + 1
                breakdown = True
                break
            basis[:, j + 1] = w / hess[j + 1, j]
        vals, vecs = np.linalg.eig(hess[:size, :size])
        i = int(np.argmax(np.abs(vals)))
        theta = float(np.abs(vals[i]))
        # invariant subspace found: Ritz values are exact eigenvalues
        if breakdown or theta == 0.0:
            return theta, it + 1
        residual = abs(hess[size, size - 1] * vecs[-1, i])
        if residual <= tol * theta:
            return theta, it + 1
        lead = np.argsort(-np.abs(vals))[:4]
        ritz = basis[:, :size] @ vecs[:, lead]
        v = (ritz.real + ritz.imag).sum(axis=1)
        if not np.any(v):
            v = basis[:, -1]
    raise ConvergenceError(
        f"spectral radius did not converge in {max_iter} restarts", estimate=theta
    )


def spectral_radius_estimate(m, tol: float = 1e-8, max_iter: int = 500,
                             restarts: int = 3, seed: int = 0) -> float:
    """Estimate the spectral radius max|eig(m)| of a square matrix.

    Runs restarted Arnoldi from ``restarts`` random start vectors and keeps
    the largest converged value, which guards against a start vector that is
    nearly orthogonal to the dominant eigenspace.
    """
    m = _as_square(m)
    if tol <= 0 or max_iter < 1:
        raise ValueError("tol must be > 0 and max_iter >= 1")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    n = m.shape[0]
    if n == 1:
        return float(abs(m[0, 0]))
    if not np.any(m):
        return 0.0
    rng = SeededRng(seed)
    best = 0.0
    converged = False
    last_error = None
    for r in range(max(1, restarts)):
        v0 = rng.uniform(-1.0, 1.0, n)
        try:
            theta, _ = _arnoldi_radius(m, v0, tol, max_iter, krylov_dim=30)
        except ConvergenceError as exc:
            last_error = exc
            best = max(best, exc.estimate or 0.0)
            continue
        converged = True
        best = max(best, theta)
    if not converged:
        raise ConvergenceError(str(last_error), estimate=best)
    return best


def ridge_solve(features, targets, lam: float = 0.0) -> np.ndarray:
    """Tikhonov-regularised least squares.

    Returns ``W`` of shape (Y, F) minimising
    ``||features @ W.T - targets||^2 + lam * ||W||^2`` via a Cholesky solve of
    the normal equations ``(X^T X + lam I) W^T = X^T Y``.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if x.ndim != 2:
        raise DimensionError(f"features must be 2-D, got shape {x.shape}")
    if y.ndim == 1:
        y = y[:, None]
    if y.shape[0] != x.shape[0]:
        raise DimensionError(f"{x.shape[0]} feature rows vs {y.shape[0]} target rows")
    if lam < 0:
        raise ValueError("lam must be >= 0")
    t, f = x.shape
    if t < f:
        log.warning("ridge_solve: %d samples for %d features; system is underdetermined", t, f)
    gram = x.T @ x
    if lam:
        gram[np.diag_indices_from(gram)] += lam
    rhs = x.T @ y
    try:
        factor = linalg.cho_factor(gram, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise SingularSystemError(
            "normal equations are singular; use a regularisation lam > 0"
        ) from exc
    diag = np.abs(np.diag(factor[0]))
    if lam == 0 and diag.min() <= np.sqrt(np.finfo(float).eps * f) * diag.max():
        raise SingularSystemError(
            "normal equations are numerically singular; use a regularisation lam > 0"
        )
    w = linalg.cho_solve(factor, rhs, check_finite=False)
    return w.T


def fft_magnitude(signal, n: int) -> np.ndarray:
    """One-sided magnitude spectrum of length ``n // 2 + 1``.

    The signal is truncated or zero-padded to ``n`` samples; bin ``k`` is the
    frequency ``k / n`` cycles per step. No window is applied.
    """
    if n < 1 or n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    s = np.asarray(signal, dtype=float)
    if s.ndim != 1:
        raise DimensionError("signal must be 1-D")
    return np.abs(np.fft.rfft(s, n=n))


def squared_correlation(a, b) -> float:
    """Squared Pearson correlation ``cov(a,b)^2 / (var(a) var(b))``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise DimensionError("inputs must be 1-D with equal length >= 2")
    da = a - a.mean()
    db = b - b.mean()
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0.0 or vb == 0.0:
        raise DegenerateInputError("zero variance input")
    r2 = float(da @ db) ** 2 / (va * vb)
    return min(1.0, r2)
