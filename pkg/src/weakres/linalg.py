"""Exact complex linear algebra on small dense matrices.

Everything here works on plain ``numpy`` arrays of ``complex128``: kets are
1-d arrays, operators are square 2-d arrays in row-major order.  Dimensions
are capped at :data:`MAX_DIM` (the largest configuration anywhere in the
package is a qubit tensored with a truncated oscillator, 2 x 32).

Two routes to the matrix exponential are exposed on purpose:

* :func:`expm` -- Pade scaling-and-squaring (via scipy) for any dim <= 64,
* :func:`exp_su2` -- the closed su(2) form for dim 2,

so each can validate the other in the test suite.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.linalg

from .errors import CapacityError, DimensionMismatchError, ExpmBudgetError

__all__ = [
    "MAX_DIM",
    "EXPM_NORM_BUDGET",
    "kron",
    "expm",
    "exp_su2",
    "dagger",
    "inner",
    "norm",
    "ket",
    "as_matrix",
]

# Largest supported operator dimension: qubit (2) x truncated oscillator (32).
MAX_DIM = 64

# expm refuses inputs with ||s*m||_inf beyond this; scaling-and-squaring
# accuracy degrades and overflow becomes possible for wilder inputs.
EXPM_NORM_BUDGET = 128.0

# Mutation hook for the verification suite: multiplies the sin coefficient of
# the closed su(2) exponential.  1.0 in normal operation; `weakres verify`
# reads WEAKRES_MUTATE_SU2 so a deliberately broken kernel is caught.
_SU2_SIN_SCALE = float(os.environ.get("WEAKRES_MUTATE_SU2", "1.0"))


def as_matrix(m) -> np.ndarray:
    """Coerce to a square complex matrix, checking shape and finiteness."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("matrix entries must be finite")
    return a


def ket(amplitudes) -> np.ndarray:
    """Coerce to a complex state vector, checking finiteness."""
    v = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
    if v.size < 1:
        raise DimensionMismatchError("ket needs at least one amplitude")
    if not (np.all(np.isfinite(v.real)) and np.all(np.isfinite(v.imag))):
        raise ValueError("ket amplitudes must be finite")
    return v


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hermitian inner product <a|b> (conjugate-linear in the first slot)."""
    return complex(np.vdot(a, b))


def norm(v: np.ndarray) -> float:
    return float(np.linalg.norm(v))


def kron(a, b) -> np.ndarray:
    """Kronecker product with the row-major index convention
    ``(i*db + k, j*db + l) -> a[i, j] * b[k, l]``.

    Raises :class:`CapacityError` when the product dimension exceeds
    :data:`MAX_DIM`.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    d = a.shape[0] * b.shape[0]
    if d > MAX_DIM:
        raise CapacityError(f"kron dimension {d} exceeds cap {MAX_DIM}")
    return np.kron(a, b)


def expm(m, s: complex = 1.0) -> np.ndarray:
    """exp(s*m) by Pade scaling-and-squaring.

    Relative accuracy is ~1e-13 or better for ||s*m|| within the budget;
    inputs beyond :data:`EXPM_NORM_BUDGET` raise :class:`ExpmBudgetError`.
    """
    m = as_matrix(m)
    if m.shape[0] > MAX_DIM:
        raise CapacityError(f"expm dimension {m.shape[0]} exceeds cap {MAX_DIM}")
    scaled = complex(s) * m
    nrm = np.linalg.norm(scaled, np.inf)
    if nrm > EXPM_NORM_BUDGET:
        raise ExpmBudgetError(
            f"||s*m||_inf = {nrm:.3g} exceeds scaling budget {EXPM_NORM_BUDGET}"
        )
    return scipy.linalg.expm(scaled)


def _sigma_dot(n: np.ndarray) -> np.ndarray:
    """n . sigma for a complex triple n."""
    n1, n2, n3 = n
    return np.array([[n3, n1 - 1j * n2], [n1 + 1j * n2, -n3]], dtype=np.complex128)


def exp_su2(decomp, theta: float) -> np.ndarray:
    """Closed-form exp(-i*theta*h*(n0 + n.sigma)) for a 2x2 generator.

    ``decomp`` is any object with attributes ``h`` (real > 0), ``n0``
    (complex) and ``n`` (complex triple), e.g. :class:`weakres.pauli.PauliDecomp`.

    Uses lam = sqrt(n.n) with the *bilinear* (unconjugated) dot product; the
    result is branch-independent because cos and sin(z)/z are even, and the
    lam -> 0 limit is taken by series.  Valid for complex (non-Hermitian)
    triples as well.
    """
    n = np.asarray(decomp.n, dtype=np.complex128)
    z0 = -1j * theta * decomp.h * complex(decomp.n0)
    phase = np.exp(z0)
    lam = np.sqrt(np.dot(n, n))  # bilinear, principal branch
    z = theta * decomp.h * lam
    if abs(z) < 1e-6:
        # sin(z)/lam = theta*h * (1 - z^2/6 + z^4/120 - ...)
        sinc = theta * decomp.h * (1.0 - z * z / 6.0 + z**4 / 120.0)
        cos = np.cos(z)
    else:
        sinc = np.sin(z) / lam
        cos = np.cos(z)
    eye = np.eye(2, dtype=np.complex128)
    return phase * (cos * eye - 1j * (_SU2_SIN_SCALE * sinc) * _sigma_dot(n))
