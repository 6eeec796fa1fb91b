"""Cyclic Jacobi eigensolver for small symmetric matrices.

The sampled positive-semidefiniteness check needs eigenvalues of n x n
symmetric matrices with n <= 32; a dependency-free cyclic Jacobi sweep is
cheap at that size and deterministic across platforms.
"""

from __future__ import annotations

import numpy as np


def jacobi_eigenvalues(matrix, max_sweeps: int = 50) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, ascending.

    The input is symmetrized as (M + M^T)/2 before sweeping; callers that
    care about asymmetry must measure it separately.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    if n == 1:
        return np.array([M[0, 0]])
    A = 0.5 * (M + M.T)
    scale = max(1.0, float(np.max(np.abs(A))))
    stop = 1e-16 * scale
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(A[p, q]))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= stop:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(1.0 + theta * theta))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = A[p, p], A[q, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for i in range(n):
                    if i == p or i == q:
                        continue
                    aip, aiq = A[i, p], A[i, q]
                    A[i, p] = aip * c - aiq * s
                    A[p, i] = A[i, p]
                    A[i, q] = aiq * c + aip * s
                    A[q, i] = A[i, q]
    return np.sort(np.diag(A).copy())
