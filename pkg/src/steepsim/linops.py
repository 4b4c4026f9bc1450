"""Complex-valued sampling and linear algebra primitives shared by all modules.

Thin contract layer over numpy: circular complex Gaussian draws, Hermitian
eigendecomposition with a fixed (descending) eigenvalue order, and a guarded
positive-definite solver. Vectors and matrices are plain complex128 ndarrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerance ladder: symmetry checks at 1e-12, algebraic identities at 1e-10,
# statistical checks at 3-5 standard errors (see tests).
HERMITIAN_TOL = 1e-12


class DegenerateChannelError(Exception):
    """A channel draw or derived matrix is too degenerate to analyze."""


def sample_cn(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a length-dim vector of i.i.d. CN(0,1) entries.

    Real and imaginary parts are independent N(0, 1/2), so each entry has
    unit total variance.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    re = rng.standard_normal(dim)
    im = rng.standard_normal(dim)
    return (re + 1j * im) / np.sqrt(2.0)


def sample_cn_matrix(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a rows-by-cols matrix of i.i.d. CN(0,1) entries."""
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dims must be positive, got {rows}x{cols}")
    re = rng.standard_normal((rows, cols))
    im = rng.standard_normal((rows, cols))
    return (re + 1j * im) / np.sqrt(2.0)


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition Q diag(vals) Q^H with eigenvalues sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(m: np.ndarray) -> HermitianEig:
    """Full eigendecomposition of a Hermitian matrix.

    Eigenvalues come out descending so that the zero modes of a rank-deficient
    Gram matrix occupy the trailing slots.

    Raises:
        ValueError: if m is not Hermitian within HERMITIAN_TOL (relative).
    """
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if float(np.max(np.abs(m - m.conj().T))) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    return HermitianEig(eigenvalues=vals[::-1].copy(), eigenvectors=vecs[:, ::-1].copy())


def solve_psd(m: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve m @ x = rhs for Hermitian positive definite m.

    Raises:
        DegenerateChannelError: if m is singular or indefinite (Cholesky fails).
    """
    m = np.asarray(m)
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise DegenerateChannelError("matrix is not positive definite") from exc
    return np.linalg.solve(m, rhs)
