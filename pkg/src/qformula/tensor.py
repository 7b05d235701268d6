"""Tensor-product linear algebra on state vectors.

The norm and inner-product factorization of tensor products (and the
orthonormality of product families built from orthonormal factors) are
the algebraic backbone of the squeezing rewrite; these helpers keep the
conventions in one place and are exercised by randomized identity sweeps
at tolerance 1e-12.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuit import DEFAULT_RANK_TOL


class DimensionError(ValueError):
    """Vector dimensions are incompatible or not powers of two."""


def _as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if v.size == 0 or (v.size & (v.size - 1)) != 0:
        raise DimensionError(f"{name} dimension {v.size} is not a power of two")
    return v


def kron(a, b) -> np.ndarray:
    """Tensor product a (x) b; the first factor is most significant."""
    return np.kron(_as_vector(a, "first factor"), _as_vector(b, "second factor"))


def inner_product(x1, x2) -> complex:
    """<x1|x2>, conjugate-linear in the first argument."""
    v1 = np.asarray(x1, dtype=complex).reshape(-1)
    v2 = np.asarray(x2, dtype=complex).reshape(-1)
    if v1.size != v2.size:
        raise DimensionError(f"dimension mismatch: {v1.size} vs {v2.size}")
    return complex(np.vdot(v1, v2))


def orthonormalize(
    vectors: Sequence[np.ndarray], tol: float = DEFAULT_RANK_TOL
) -> tuple[list[np.ndarray], int]:
    """Orthonormal basis of span(vectors) by modified Gram-Schmidt.

    Residuals below ``tol`` times the spectral norm of the stacked input
    are treated as zero, so the returned dimension is the numerical rank
    at that threshold.  An all-zero input yields an empty basis.
    """
    if len(vectors) == 0:
        raise ValueError("orthonormalize requires a nonempty vector list")
    rows = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    dim = rows[0].size
    if any(r.size != dim for r in rows):
        raise DimensionError("vectors must share one dimension")
    stacked = np.array(rows)
    scale = float(np.linalg.norm(stacked, 2))
    if scale == 0.0:
        return [], 0
    threshold = tol * scale
    basis: list[np.ndarray] = []
    for r in rows:
        w = r.copy()
        for b in basis:
            w -= np.vdot(b, w) * b
        # second pass guards against cancellation in nearly dependent sets
        for b in basis:
            w -= np.vdot(b, w) * b
        norm = float(np.linalg.norm(w))
        if norm > threshold:
            basis.append(w / norm)
    return basis, len(basis)


def expansion_coefficients(
    basis: Sequence[np.ndarray], vectors: Sequence[np.ndarray]
) -> np.ndarray:
    """Coefficient matrix c[j, i] = <basis_j | vectors_i>."""
    return np.array([[np.vdot(b, v) for v in vectors] for b in basis])
