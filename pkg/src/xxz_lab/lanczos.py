"""Lanczos iteration with full reorthogonalization for symmetric operators."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .exceptions import ConvergenceError


@dataclass
class LanczosResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    residuals: np.ndarray
    steps: int


def lanczos(matvec, n, k=1, which="smallest", tol=1e-10, max_steps=None, start=None,
            seed=0, check_every=10, dtype=float):
    """k extremal eigenpairs of the symmetric operator ``matvec`` on R^n (or C^n).

    Every new Krylov vector is orthogonalized twice against all previous ones.
    When the Krylov space becomes invariant the iteration continues from a
    fresh random vector orthogonal to everything seen so far, which lets
    repeated eigenvalues show up with their multiplicity.

    Convergence means |beta_m y_m| <= tol * max(1, |theta|) for each wanted
    Ritz pair.  Raises ConvergenceError (with the residuals) if ``max_steps``
    is reached first.
    """
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    max_steps = min(n, max_steps or max(300, 20 * k))
    rng = np.random.default_rng(seed)
    q = np.asarray(start, dtype=dtype).copy() if start is not None else rng.standard_normal(n).astype(dtype)
    q /= np.linalg.norm(q)
    Q = np.zeros((max_steps, n), dtype=dtype)
    alphas, betas = [], []
    beta = 0.0
    res = None
    for m in range(max_steps):
        Q[m] = q
        w = matvec(q)
        alpha = float(np.real(np.vdot(q, w)))
        w = w - alpha * q - (beta * Q[m - 1] if m > 0 else 0.0)
        for _ in range(2):
            w -= Q[: m + 1].T @ (Q[: m + 1].conj() @ w)
        beta = float(np.linalg.norm(w))
        alphas.append(alpha)
        done = m + 1 == max_steps
        if beta <= 1e-12 * max(1.0, abs(alpha)):
            # invariant subspace: restart orthogonally
            if m + 1 == n:
                beta, done = 0.0, True
            else:
                w = rng.standard_normal(n).astype(dtype)
                for _ in range(2):
                    w -= Q[: m + 1].T @ (Q[: m + 1].conj() @ w)
                beta_new = np.linalg.norm(w)
                if beta_new < 1e-10:
                    beta, done = 0.0, True
                else:
                    q = w / beta_new
                    betas.append(0.0)
                    beta = 0.0
                    continue
        if (m + 1) >= k and ((m + 1) % check_every == 0 or done):
            theta, Y = eigh_tridiagonal(np.array(alphas), np.array(betas))
            sel = np.arange(k) if which == "smallest" else np.arange(len(theta) - k, len(theta))[::-1]
            res = np.abs(beta * Y[-1, sel])
            if np.all(res <= tol * np.maximum(1.0, np.abs(theta[sel]))) or done:
                vecs = Q[: m + 1].T @ Y[:, sel]
                if not np.all(res <= tol * np.maximum(1.0, np.abs(theta[sel]))):
                    raise ConvergenceError(
                        f"Lanczos did not converge in {m + 1} steps", residuals=res)
                true_res = np.array([np.linalg.norm(matvec(vecs[:, i]) - theta[s] * vecs[:, i])
                                     for i, s in enumerate(sel)])
                return LanczosResult(theta[sel], vecs, true_res, m + 1)
        if done:
            break
        betas.append(beta)
        q = w / beta
    raise ConvergenceError(f"Lanczos did not converge in {max_steps} steps", residuals=res)
