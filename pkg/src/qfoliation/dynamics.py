"""Propagators for hyperplane-foliated open-system dynamics.

Three transports act on a state:

* deterministic completely-positive evolution of the density matrix along
  the hyperplane offset a (`lindblad_propagate`),
* its stochastic pure-state unraveling along a (`qsd_step`,
  `qsd_trajectory`, `ensemble_density`), whose ensemble mean reproduces
  the density-matrix evolution,
* unitary transport between hyperplane normals, i.e. boosts
  (`boost_transport`).

The unraveling is the standard quantum-state-diffusion Ito form with one
complex Wiener process per coupling operator: drift
(<L^dag>L - L^dag L/2 - <L^dag><L>/2) psi and diffusion (L - <L>) psi per
channel, integrated by Euler-Maruyama with optional per-step renormalization.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm as _expm

from . import rng
from .errors import (
    DimMismatch,
    MissingBoostGenerator,
    NonHermitianInput,
    StepTooLarge,
    SuperluminalBeta,
    ZeroNorm,
)
from .linalg import (
    HERMITICITY_TOL,
    as_complex,
    expm_generator,
    hermiticity_defect,
    require_square,
    validate_density,
    validate_state,
)

_ZERO_NORM_FLOOR = 1e-12

# step * ||L^dag L|| above this draws a warning: the Euler-Maruyama weak
# error is no longer comfortably below typical ensemble statistics.
QSD_STEP_SAFETY = 0.1


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class GeneratorSet:
    """Hamiltonian H, boost generators Ks (up to 3), coupling operators Ls.

    H and every K must be Hermitian; all operators share one dimension.
    Arrays are stored as read-only copies so a set can be shared across
    threads and ensembles safely.
    """

    H: np.ndarray
    Ks: tuple = ()
    Ls: tuple = ()

    def __post_init__(self) -> None:
        h = require_square(as_complex(self.H))
        if hermiticity_defect(h) > HERMITICITY_TOL:
            raise NonHermitianInput(
                f"H Hermiticity defect {hermiticity_defect(h):.3e} exceeds {HERMITICITY_TOL:.1e}"
            )
        object.__setattr__(self, "H", _readonly(h))
        if len(self.Ks) > 3:
            raise ValueError(f"at most 3 boost generators supported, got {len(self.Ks)}")
        ks = []
        for i, k in enumerate(self.Ks):
            k = require_square(as_complex(k))
            if k.shape != h.shape:
                raise DimMismatch(f"K[{i}] shape {k.shape} != H shape {h.shape}")
            if hermiticity_defect(k) > HERMITICITY_TOL:
                raise NonHermitianInput(
                    f"K[{i}] Hermiticity defect {hermiticity_defect(k):.3e} "
                    f"exceeds {HERMITICITY_TOL:.1e}"
                )
            ks.append(_readonly(k))
        object.__setattr__(self, "Ks", tuple(ks))
        ls = []
        for i, lk in enumerate(self.Ls):
            lk = require_square(as_complex(lk))
            if lk.shape != h.shape:
                raise DimMismatch(f"L[{i}] shape {lk.shape} != H shape {h.shape}")
            ls.append(_readonly(lk))
        object.__setattr__(self, "Ls", tuple(ls))

    @property
    def dim(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class TrajectoryConfig:
    """Fixed-step integration plan for one stochastic trajectory.

    The evolution spans step*steps in the hyperplane offset; seed picks the
    master noise stream and renormalize controls per-step normalization.
    """

    step: float
    steps: int
    seed: int = 0
    renormalize: bool = True

    def __post_init__(self) -> None:
        if self.step <= 0.0:
            raise ValueError(f"step must be positive, got {self.step:.6g}")
        if self.steps < 0:
            raise ValueError(f"steps must be non-negative, got {self.steps}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    @property
    def span(self) -> float:
        return self.step * self.steps


def coupling_norms(gen: GeneratorSet) -> list[float]:
    """Spectral norms ||L_k^dag L_k|| of the coupling operators."""
    return [float(np.max(np.linalg.eigvalsh(lk.conj().T @ lk))) for lk in gen.Ls]


def generator_norm_bound(gen: GeneratorSet) -> float:
    """Upper bound on the spectral norm of the full Lindblad generator."""
    h_norm = float(np.max(np.abs(np.linalg.eigvalsh(gen.H)))) if gen.dim else 0.0
    return 2.0 * h_norm + 2.0 * sum(coupling_norms(gen))


def liouvillian(gen: GeneratorSet) -> np.ndarray:
    """Superoperator matrix on row-major-vectorized density matrices.

    With vec(rho) = rho.reshape(-1), A rho B maps to (A kron B^T) vec(rho),
    so d vec(rho)/da = liouvillian(gen) @ vec(rho).
    """
    d = gen.dim
    eye = np.eye(d, dtype=np.complex128)
    h = gen.H
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for lk in gen.Ls:
        ldl = lk.conj().T @ lk
        sup += np.kron(lk, lk.conj())
        sup -= 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return sup


def lindblad_rhs(rho: np.ndarray, gen: GeneratorSet) -> np.ndarray:
    """-i[H, rho] + sum_k (L rho L^dag - {L^dag L, rho}/2)."""
    out = -1j * (gen.H @ rho - rho @ gen.H)
    for lk in gen.Ls:
        ldl = lk.conj().T @ lk
        out += lk @ rho @ lk.conj().T - 0.5 * (ldl @ rho + rho @ ldl)
    return out


def _operator_rhs(gen: GeneratorSet):
    """lindblad_rhs on flattened states, operators precomputed."""
    d = gen.dim
    h = gen.H
    pairs = [(lk, lk.conj().T, lk.conj().T @ lk) for lk in gen.Ls]

    def rhs(v: np.ndarray) -> np.ndarray:
        rho = v.reshape(d, d)
        out = -1j * (h @ rho - rho @ h)
        for lk, lkd, ldl in pairs:
            out += lk @ rho @ lkd - 0.5 * (ldl @ rho + rho @ ldl)
        return out.reshape(-1)

    return rhs


def lindblad_propagate(
    rho0: np.ndarray,
    gen: GeneratorSet,
    span: float,
    method: str = "exact",
    step: float | None = None,
) -> np.ndarray:
    """Propagate a density matrix by `span` in the hyperplane offset.

    `exact` exponentiates the vectorized superoperator (preferred for small
    dimensions); `rk4` integrates with fixed step and must satisfy
    step * ||generator|| <= 1. The output is validated: trace, Hermiticity
    and positivity to 1e-9 (exact) or 1e-6 (rk4).
    """
    rho0 = validate_density(rho0)
    if rho0.shape[0] != gen.dim:
        raise DimMismatch(f"state dim {rho0.shape[0]} != generator dim {gen.dim}")
    if span < 0.0:
        raise ValueError(f"span must be non-negative, got {span:.6g}")
    if span == 0.0:
        return rho0.copy()
    if not any(np.any(lk) for lk in gen.Ls):
        # vanishing dissipator: evolution is exactly unitary
        u = expm_generator(gen.H, span)
        return u @ rho0 @ u.conj().T

    if method == "exact":
        propagator = _expm(liouvillian(gen) * span)
        rho = (propagator @ rho0.reshape(-1)).reshape(rho0.shape)
        tol = 1e-9
    elif method == "rk4":
        if step is None or step <= 0.0:
            raise ValueError("rk4 requires a positive step")
        bound = generator_norm_bound(gen)
        if step * bound > 1.0:
            raise StepTooLarge(
                f"step*||generator|| = {step * bound:.3e} > 1; reduce step below {1.0 / bound:.3e}"
            )
        n = max(1, math.ceil(span / step))
        h = span / n
        # one superoperator matvec per stage beats four operator products
        # per stage; fall back to the operator form when dim^2 gets large
        if gen.dim <= 32:
            sup = liouvillian(gen)

            def rhs(v: np.ndarray) -> np.ndarray:
                return sup @ v

        else:
            rhs = _operator_rhs(gen)
        v = rho0.reshape(-1).copy()
        for _ in range(n):
            k1 = rhs(v)
            k2 = rhs(v + 0.5 * h * k1)
            k3 = rhs(v + 0.5 * h * k2)
            k4 = rhs(v + h * k3)
            v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = v.reshape(rho0.shape)
        tol = 1e-6
    else:
        raise ValueError(f"unknown method {method!r}, expected 'exact' or 'rk4'")

    return validate_density(rho, hermiticity_tol=tol, trace_tol=tol, positivity_tol=tol)


def lindblad_exact_twolevel(rho0: np.ndarray, gamma: float, span: float) -> np.ndarray:
    """Closed form for a two-level system with H = 0, L = sqrt(gamma)|0><0|.

    Populations are constant and each coherence decays by
    exp(-gamma*span/2); serves as the independent oracle for
    lindblad_propagate on the decoherence scenario.
    """
    rho0 = require_square(as_complex(rho0))
    if rho0.shape != (2, 2):
        raise DimMismatch(f"closed form is for dim 2, got shape {rho0.shape}")
    if gamma < 0.0:
        raise ValueError(f"gamma must be non-negative, got {gamma:.6g}")
    decay = math.exp(-0.5 * gamma * span)
    rho = rho0.copy()
    rho[0, 1] *= decay
    rho[1, 0] *= decay
    return rho


def decohering_coupling(gamma: float, dim: int = 2) -> np.ndarray:
    """Coupling operator sqrt(gamma) |0><0| driving pure decoherence."""
    if gamma < 0.0:
        raise ValueError(f"gamma must be non-negative, got {gamma:.6g}")
    lk = np.zeros((dim, dim), dtype=np.complex128)
    lk[0, 0] = math.sqrt(gamma)
    return lk


# -- quantum state diffusion --------------------------------------------------


def _qsd_ops(gen: GeneratorSet):
    """Stacked arrays reused across steps: (Ls, sum_k L^dag L)."""
    d = gen.dim
    if gen.Ls:
        ls = np.stack(gen.Ls)
        ldl_sum = np.einsum("kji,kjl->il", ls.conj(), ls)
    else:
        ls = np.zeros((0, d, d), dtype=np.complex128)
        ldl_sum = np.zeros((d, d), dtype=np.complex128)
    return ls, ldl_sum


def _qsd_step_batch(
    psis: np.ndarray,
    h_op: np.ndarray,
    ls: np.ndarray,
    ldl_sum: np.ndarray,
    dxi: np.ndarray,
    step: float,
    renormalize: bool,
) -> np.ndarray:
    """One Euler-Maruyama step on a batch of states, shape (M, d).

    einsum keeps per-row arithmetic independent of the batch size, so a
    batch row is bit-identical to the same trajectory run alone.
    """
    drift = -1j * np.einsum("ij,mj->mi", h_op, psis)
    if ls.shape[0]:
        lpsi = np.einsum("kij,mj->kmi", ls, psis)
        lexp = np.einsum("mi,kmi->km", psis.conj(), lpsi)
        drift += np.einsum("km,kmi->mi", lexp.conj(), lpsi)
        drift -= 0.5 * np.einsum("ij,mj->mi", ldl_sum, psis)
        drift -= 0.5 * np.einsum("km,km->m", lexp.conj(), lexp)[:, None] * psis
        noise = np.einsum("kmi,km->mi", lpsi, dxi.T)
        noise -= np.einsum("km,km->m", lexp, dxi.T)[:, None] * psis
        out = psis + drift * step + noise
    else:
        out = psis + drift * step
    norms = np.sqrt(np.einsum("mi,mi->m", out.conj(), out).real)
    if np.any(norms < _ZERO_NORM_FLOOR):
        worst = float(np.min(norms))
        raise ZeroNorm(f"trajectory norm collapsed to {worst:.3e} before renormalization")
    if renormalize:
        out = out / norms[:, None]
    return out


def _noise_or_empty(dxi: np.ndarray | None, channels: int) -> np.ndarray:
    if dxi is None:
        if channels:
            raise DimMismatch(f"{channels} coupling operators need noise increments")
        return np.zeros((0,), dtype=np.complex128)
    dxi = np.asarray(dxi, dtype=np.complex128)
    if dxi.shape != (channels,):
        raise DimMismatch(f"expected {channels} noise increments, got shape {dxi.shape}")
    return dxi


def qsd_step(
    psi: np.ndarray,
    gen: GeneratorSet,
    dxi: np.ndarray | None,
    step: float,
    renormalize: bool = True,
) -> np.ndarray:
    """One stochastic step of the pure-state unraveling.

    dxi holds one complex Wiener increment per coupling operator (None only
    when there are none). Eigenstates of every L are fixed points: both the
    fluctuation operator and the drift annihilate them.
    """
    psi = as_complex(psi)
    if psi.ndim != 1 or psi.shape[0] != gen.dim:
        raise DimMismatch(f"state shape {psi.shape} incompatible with dim {gen.dim}")
    ls, ldl_sum = _qsd_ops(gen)
    dxi = _noise_or_empty(dxi, ls.shape[0])
    out = _qsd_step_batch(
        psi[None, :], gen.H, ls, ldl_sum, dxi[None, :], step, renormalize
    )
    return out[0]


def _warn_if_step_coarse(gen: GeneratorSet, step: float) -> None:
    norms = coupling_norms(gen)
    if norms and step * max(norms) > QSD_STEP_SAFETY:
        warnings.warn(
            f"step*max||L^dag L|| = {step * max(norms):.3g} exceeds {QSD_STEP_SAFETY}; "
            "stochastic integration error may dominate",
            stacklevel=3,
        )


def qsd_trajectory(
    psi0: np.ndarray,
    gen: GeneratorSet,
    cfg: TrajectoryConfig,
    stream: int = 0,
) -> np.ndarray:
    """Integrate one trajectory; returns the path, shape (steps+1, dim).

    Deterministic given (cfg.seed, stream): the noise at every step is a
    pure function of those, so identical seeds give bit-identical paths.
    """
    psi0 = validate_state(psi0)
    if psi0.shape[0] != gen.dim:
        raise DimMismatch(f"state shape {psi0.shape} incompatible with dim {gen.dim}")
    _warn_if_step_coarse(gen, cfg.step)
    ls, ldl_sum = _qsd_ops(gen)
    k = ls.shape[0]
    keys = rng.stream_keys(cfg.seed, [stream])
    path = np.empty((cfg.steps + 1, gen.dim), dtype=np.complex128)
    path[0] = psi0
    psis = psi0[None, :]
    for s in range(cfg.steps):
        dxi = rng.wiener_block(keys, s, k, cfg.step) if k else np.zeros((1, 0), complex)
        psis = _qsd_step_batch(psis, gen.H, ls, ldl_sum, dxi, cfg.step, cfg.renormalize)
        path[s + 1] = psis[0]
    return path


def ensemble_final_states(
    psi0: np.ndarray,
    gen: GeneratorSet,
    cfg: TrajectoryConfig,
    n_traj: int,
) -> np.ndarray:
    """Final states of n_traj trajectories, shape (n_traj, dim).

    Trajectory m runs on noise stream (cfg.seed, m); rows are bit-identical
    to qsd_trajectory(..., stream=m) finals regardless of batch size, which
    also makes the ensemble independent of any execution schedule.
    """
    psi0 = validate_state(psi0)
    if psi0.shape[0] != gen.dim:
        raise DimMismatch(f"state shape {psi0.shape} incompatible with dim {gen.dim}")
    if n_traj < 1:
        raise ValueError(f"need at least one trajectory, got {n_traj}")
    _warn_if_step_coarse(gen, cfg.step)
    ls, ldl_sum = _qsd_ops(gen)
    k = ls.shape[0]
    keys = rng.stream_keys(cfg.seed, np.arange(n_traj))
    psis = np.tile(psi0, (n_traj, 1))
    for s in range(cfg.steps):
        dxi = rng.wiener_block(keys, s, k, cfg.step) if k else np.zeros((n_traj, 0), complex)
        psis = _qsd_step_batch(psis, gen.H, ls, ldl_sum, dxi, cfg.step, cfg.renormalize)
    return psis


def ensemble_density(
    psi0: np.ndarray,
    gen: GeneratorSet,
    cfg: TrajectoryConfig,
    n_traj: int,
) -> np.ndarray:
    """Mean projector over n_traj trajectory finals; a valid density matrix.

    Final states are normalized before forming projectors so the average
    has unit trace even when cfg.renormalize is off.
    """
    finals = ensemble_final_states(psi0, gen, cfg, n_traj)
    norms = np.sqrt(np.einsum("mi,mi->m", finals.conj(), finals).real)
    if np.any(norms < _ZERO_NORM_FLOOR):
        raise ZeroNorm(f"final-state norm collapsed to {float(np.min(norms)):.3e}")
    finals = finals / norms[:, None]
    rho = np.einsum("mi,mj->ij", finals, finals.conj()) / n_traj
    return validate_density(rho)


# -- boost transport ----------------------------------------------------------


def boost_transport(state: np.ndarray, gen: GeneratorSet, beta: float) -> np.ndarray:
    """Unitary transport between hyperplane normals for a boost along +x.

    Applies U = exp(-i * atanh(beta) * K_x) to a state vector (U psi) or a
    density matrix (U rho U^dag). A zero K_x makes the transport the exact
    identity, i.e. the zeroth-order form of the change of observer.
    """
    state = as_complex(state)
    if beta == 0.0:
        return state.copy()
    if abs(beta) >= 1.0:
        raise SuperluminalBeta(f"|beta| = {abs(beta):.6g} >= 1")
    if not gen.Ks:
        raise MissingBoostGenerator("no boost generator configured and beta != 0")
    k_x = gen.Ks[0]
    if state.shape[-1] != k_x.shape[0]:
        raise DimMismatch(f"state shape {state.shape} incompatible with dim {k_x.shape[0]}")
    if not np.any(k_x):
        return state.copy()
    u = expm_generator(k_x, math.atanh(beta))
    if state.ndim == 1:
        return u @ state
    if state.ndim == 2:
        require_square(state)
        return u @ state @ u.conj().T
    raise DimMismatch(f"expected a vector or matrix, got shape {state.shape}")
