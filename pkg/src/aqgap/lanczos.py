"""Lanczos eigensolver with full reorthogonalization and locking.

Each pass runs a single Krylov sequence from a seeded random start vector,
orthogonal to the eigenvectors already locked, until the lowest Ritz pair
converges; that pair is then locked. Degenerate eigenvalues are recovered
because every pass starts in the orthogonal complement of the locked space.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigh_tridiagonal

DEFAULT_SEED = 20080301


class LanczosError(RuntimeError):
    """Raised when a pass hits the iteration cap before converging."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(f"{message} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


@dataclass
class LanczosResult:
    values: np.ndarray
    vectors: np.ndarray  # columns
    residuals: np.ndarray
    matvecs: int


def _orthogonalize(w: np.ndarray, basis: list[np.ndarray], locked: np.ndarray | None) -> None:
    # two passes of classical Gram-Schmidt ("twice is enough")
    for _ in range(2):
        if locked is not None:
            w -= locked @ (locked.T @ w)
        if basis:
            Q = np.asarray(basis).T
            w -= Q @ (Q.T @ w)


def _lowest_pair(matvec: Callable[[np.ndarray], np.ndarray], dim: int,
                 locked: np.ndarray | None, rng: np.random.Generator,
                 tol: float, max_iter: int) -> tuple[float, np.ndarray, float, int]:
    free = dim - (0 if locked is None else locked.shape[1])
    q = rng.standard_normal(dim)
    _orthogonalize(q, [], locked)
    q /= np.linalg.norm(q)
    basis = [q]
    alphas: list[float] = []
    betas: list[float] = []
    best = np.inf
    check_every = 1
    for it in range(1, max_iter + 1):
        w = matvec(basis[-1])
        alpha = float(basis[-1] @ w)
        alphas.append(alpha)
        w -= alpha * basis[-1]
        if len(basis) > 1:
            w -= betas[-1] * basis[-2]
        _orthogonalize(w, basis, locked)
        beta = float(np.linalg.norm(w))
        m = len(alphas)
        exhausted = m >= free or beta <= 1e-14 * max(1.0, abs(alpha))
        if exhausted or it % check_every == 0 or it == max_iter:
            if m == 1:
                theta, y = np.array([alphas[0]]), np.ones((1, 1))
            else:
                theta, y = eigh_tridiagonal(np.array(alphas), np.array(betas),
                                            select="i", select_range=(0, 0))
            res = abs(beta * y[-1, 0])
            best = min(best, res)
            if res <= tol or exhausted:
                vec = np.asarray(basis).T @ y[:, 0]
                vec /= np.linalg.norm(vec)
                return float(theta[0]), vec, res, it
            # checking every step is cheap while m is small
            check_every = 1 if m < 40 else 4
        betas.append(beta)
        basis.append(w / beta)
    raise LanczosError(f"Lanczos did not converge in {max_iter} iterations", best)


def lanczos_lowest(matvec: Callable[[np.ndarray], np.ndarray], dim: int, k: int,
                   tol: float, seed: int = DEFAULT_SEED,
                   max_iter: int | None = None) -> LanczosResult:
    """Lowest ``k`` eigenpairs of a real symmetric operator.

    ``tol`` bounds the Ritz residual of each locked pair. ``max_iter`` caps
    the total number of Krylov steps over all passes; the default is
    ``50 * k * sqrt(dim)``.
    """
    if not 1 <= k <= dim:
        raise ValueError(f"k={k} out of range for dimension {dim}")
    if max_iter is None:
        max_iter = int(50 * k * np.sqrt(dim)) + 20
    rng = np.random.default_rng(seed)
    vecs: list[np.ndarray] = []
    vals: list[float] = []
    used = 0
    for _ in range(k):
        locked = np.asarray(vecs).T if vecs else None
        theta, v, _, its = _lowest_pair(matvec, dim, locked, rng, tol, max_iter - used)
        used += its
        vals.append(theta)
        vecs.append(v)
    order = np.argsort(vals, kind="stable")
    values = np.asarray(vals)[order]
    vectors = np.asarray(vecs).T[:, order]
    residuals = np.array([np.linalg.norm(matvec(vectors[:, j]) - values[j] * vectors[:, j])
                          for j in range(k)])
    return LanczosResult(values, vectors, residuals, used + k)
