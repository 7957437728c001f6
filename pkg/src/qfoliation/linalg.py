"""Complex dense linear algebra for small Hilbert spaces (dim 2..64).

States are plain numpy arrays: a state vector is a 1-D complex array of unit
Euclidean norm, a density matrix is a Hermitian, unit-trace, positive
semidefinite 2-D complex array. Validators return the checked array; all
operations return new arrays and never mutate their inputs.
"""

from __future__ import annotations

import numpy as np

from .errors import (
    BadTrace,
    DimMismatch,
    NonHermitianInput,
    NotHermitian,
    NotPositive,
    ValidationError,
    ZeroNorm,
)

# Validation tolerances; single source of truth, overridable per call.
HERMITICITY_TOL = 1e-9
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-9

_ZERO_NORM_FLOOR = 1e-12


def as_complex(values) -> np.ndarray:
    """Coerce to a fresh complex128 array, rejecting NaN/Inf entries."""
    arr = np.array(values, dtype=np.complex128)
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise ValueError("matrix/vector entries must be finite")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(m).conj().T.copy()


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-abs deviation of m from its own conjugate transpose."""
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def require_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def require_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")


def expm_generator(g: np.ndarray, s: float, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """exp(-i*s*g) for Hermitian g, via eigendecomposition.

    Unitary to floating-point accuracy for the small dimensions handled
    here; raises NonHermitianInput if g fails the Hermiticity check.
    """
    g = require_square(as_complex(g))
    defect = hermiticity_defect(g)
    if defect > tol:
        raise NonHermitianInput(
            f"generator Hermiticity defect {defect:.3e} exceeds tolerance {tol:.1e}"
        )
    w, v = np.linalg.eigh(g)
    phases = np.exp(-1j * s * w)
    return (v * phases) @ v.conj().T


def normalize_state(psi: np.ndarray) -> np.ndarray:
    """Return psi scaled to unit norm; ZeroNorm if the norm is degenerate."""
    psi = as_complex(psi)
    n = float(np.linalg.norm(psi))
    if n < _ZERO_NORM_FLOOR:
        raise ZeroNorm(f"state norm {n:.3e} below floor {_ZERO_NORM_FLOOR:.0e}")
    return psi / n


def density_from_state(psi: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| of the normalized state."""
    psi = normalize_state(psi)
    return np.outer(psi, psi.conj())


def expectation(a: np.ndarray, rho: np.ndarray) -> float:
    """Re tr(a rho) for Hermitian a; the imaginary part must be negligible."""
    a = require_square(np.asarray(a))
    rho = require_square(np.asarray(rho))
    require_same_dim(a, rho)
    tr = complex(np.trace(a @ rho))
    assert abs(tr.imag) <= 1e-10, f"non-real expectation value: Im = {tr.imag:.3e}"
    return tr.real


def state_expectation(a: np.ndarray, psi: np.ndarray) -> float:
    """Re <psi|a|psi> for a normalized state vector."""
    a = require_square(np.asarray(a))
    psi = np.asarray(psi)
    require_same_dim(a, psi)
    val = complex(np.vdot(psi, a @ psi))
    assert abs(val.imag) <= 1e-10, f"non-real expectation value: Im = {val.imag:.3e}"
    return val.real


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Half the sum of absolute eigenvalues of (rho1 - rho2)."""
    rho1 = require_square(np.asarray(rho1))
    rho2 = require_square(np.asarray(rho2))
    require_same_dim(rho1, rho2)
    w = np.linalg.eigvalsh(rho1 - rho2)
    return 0.5 * float(np.sum(np.abs(w)))


def purity(rho: np.ndarray) -> float:
    """tr(rho^2)."""
    rho = np.asarray(rho)
    return float(np.trace(rho @ rho).real)


def validate_density(
    rho: np.ndarray,
    hermiticity_tol: float = HERMITICITY_TOL,
    trace_tol: float = TRACE_TOL,
    positivity_tol: float = POSITIVITY_TOL,
) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return the matrix.

    Each failure names the violated invariant and its magnitude.
    """
    rho = require_square(as_complex(rho))
    defect = hermiticity_defect(rho)
    if defect > hermiticity_tol:
        raise NotHermitian(
            f"Hermiticity defect {defect:.3e} exceeds tolerance {hermiticity_tol:.1e}"
        )
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > trace_tol:
        raise BadTrace(f"trace {tr:.12g} deviates from 1 by {abs(tr - 1.0):.3e}")
    w_min = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if w_min < -positivity_tol:
        raise NotPositive(f"smallest eigenvalue {w_min:.3e} below -{positivity_tol:.1e}")
    return rho


def validate_state(psi: np.ndarray, norm_tol: float = 1e-9) -> np.ndarray:
    """Check that psi is a finite unit vector; return it."""
    psi = as_complex(psi)
    if psi.ndim != 1:
        raise DimMismatch(f"expected a 1-D state vector, got shape {psi.shape}")
    n = float(np.linalg.norm(psi))
    if n < _ZERO_NORM_FLOOR:
        raise ZeroNorm(f"state norm {n:.3e} below floor {_ZERO_NORM_FLOOR:.0e}")
    if abs(n - 1.0) > norm_tol:
        raise ValidationError(f"state norm {n:.12g} deviates from 1 by {abs(n - 1.0):.3e}")
    return psi
