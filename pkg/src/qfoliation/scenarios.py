"""Two-observer scenarios: the consistency criterion and its violation.

A rest observer (R) and an observer moving with small velocity beta along +x
(M) measure the same spin observable at one space-time event. Their
hyperplanes intersect on the worldline x = ell at the rest-frame offset
a0 = ell*beta; each observer evolves the shared initial state to their own
hyperplane and takes an expectation value.

With purely unitary transport both observers agree (`check_unitary_consistency`).
Switching on decohering evolution in the offset direction while keeping the
boost transport unitary makes the R branch decay and the M branch not,
producing an order-one disagreement about a single event
(`run_counterexample`); `sweep_velocity` tracks the gap as beta -> 0 at
fixed a0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import (
    GeneratorSet,
    TrajectoryConfig,
    boost_transport,
    decohering_coupling,
    ensemble_density,
    lindblad_propagate,
)
from .errors import NonCommutingGenerators, SuperluminalBeta, ValidationError
from .foliation import (
    FourVector,
    Hyperplane,
    ObserverFrame,
    coincidence_event,
    coincidence_offset,
)
from .linalg import (
    as_complex,
    expectation,
    expm_generator,
    purity,
    state_expectation,
    trace_distance,
    validate_state,
)

# below this, decoherence is too weak for the R branch to have fully reduced
STRONG_REDUCTION_THRESHOLD = 10.0

_COMMUTATOR_TOL = 1e-10


def spin_observable() -> np.ndarray:
    """The measured spin observable |0><1| + |1><0| (eigenvalues +-1)."""
    return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def initial_state() -> np.ndarray:
    """Projector onto the equal superposition of up and down; every entry 1/2."""
    return np.full((2, 2), 0.5, dtype=np.complex128)


def initial_state_vector() -> np.ndarray:
    """The pure state (1, 1)/sqrt(2) underlying initial_state()."""
    return np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class QsdSettings:
    """Optional unraveling run alongside the density-matrix counter-example."""

    n_traj: int
    seed: int
    step: float | None = None

    def __post_init__(self) -> None:
        if self.n_traj < 1:
            raise ValidationError(f"n_traj must be >= 1, got {self.n_traj}")
        if self.seed < 0:
            raise ValidationError(f"seed must be non-negative, got {self.seed}")
        if self.step is not None and self.step <= 0.0:
            raise ValidationError(f"step must be positive, got {self.step:.6g}")


@dataclass(frozen=True)
class CounterexampleParams:
    beta: float
    ell: float
    gamma: float
    method: str = "exact"
    step: float | None = None
    qsd: QsdSettings | None = None
    c: float = 1.0

    def __post_init__(self) -> None:
        if abs(self.beta) >= 1.0:
            raise SuperluminalBeta(f"|beta| = {abs(self.beta):.6g} >= 1")
        if self.ell <= 0.0:
            raise ValidationError(f"ell must be positive, got {self.ell:.6g}")
        if self.gamma < 0.0:
            raise ValidationError(f"gamma must be non-negative, got {self.gamma:.6g}")
        if self.method not in ("exact", "rk4"):
            raise ValidationError(f"method must be 'exact' or 'rk4', got {self.method!r}")
        if self.step is not None and self.step <= 0.0:
            raise ValidationError(f"step must be positive, got {self.step:.6g}")
        if self.c <= 0.0:
            raise ValidationError(f"c must be positive, got {self.c:.6g}")


@dataclass(frozen=True)
class QsdOutcome:
    n_traj: int
    seed: int
    step: float
    steps: int
    expectation: float
    distance_to_lindblad: float


@dataclass(frozen=True)
class CounterexampleReport:
    params: CounterexampleParams
    a0: float
    expectation_R: float
    expectation_M: float
    discrepancy: float
    offdiag_final: float
    rho_initial: np.ndarray
    rho_R: np.ndarray
    rho_M: np.ndarray
    qsd: QsdOutcome | None = None


@dataclass(frozen=True)
class ConsistencyReport:
    deviation: float
    path_order_difference: float
    event: FourVector
    plane_rest: Hyperplane
    plane_moving: Hyperplane
    dissipative: bool


def _counterexample_generators(gamma: float, k_correction: np.ndarray | None) -> GeneratorSet:
    h = np.zeros((2, 2), dtype=np.complex128)
    k_x = np.zeros((2, 2), dtype=np.complex128) if k_correction is None else k_correction
    return GeneratorSet(H=h, Ks=(k_x,), Ls=(decohering_coupling(gamma),))


def run_counterexample(
    p: CounterexampleParams, k_correction: np.ndarray | None = None
) -> CounterexampleReport:
    """Evolve both observers' branches to the coincidence event and compare.

    R branch: decohering evolution over the offset a0 = ell*beta/c. M branch:
    boost transport of the initial state (identity for the default zero
    boost generator). The discrepancy is signed, M minus R. When p.qsd is
    set, the unraveling ensemble is run against the R branch as well.
    """
    a0 = coincidence_offset(p.ell, p.beta, p.c)
    if 0.0 < p.gamma * a0 < STRONG_REDUCTION_THRESHOLD:
        warnings.warn(
            f"gamma*a0 = {p.gamma * a0:.3g} < {STRONG_REDUCTION_THRESHOLD}: "
            "reduction is incomplete at the coincidence event",
            stacklevel=2,
        )
    gen = _counterexample_generators(p.gamma, k_correction)
    rho0 = initial_state()
    a_op = spin_observable()

    rho_r = lindblad_propagate(rho0, gen, a0, method=p.method, step=p.step)
    rho_m = boost_transport(rho0, gen, p.beta)

    assert purity(rho_r) <= purity(rho0) + 1e-12, "purity increased along the R branch"

    exp_r = expectation(a_op, rho_r)
    exp_m = expectation(a_op, rho_m)
    for name, val in (("expectation_R", exp_r), ("expectation_M", exp_m)):
        assert -1.0 - 1e-9 <= val <= 1.0 + 1e-9, f"{name} = {val} outside [-1, 1]"

    qsd_outcome = None
    if p.qsd is not None:
        qsd_outcome = _run_qsd_branch(p, a0, gen, rho_r, a_op)

    return CounterexampleReport(
        params=p,
        a0=a0,
        expectation_R=exp_r,
        expectation_M=exp_m,
        discrepancy=exp_m - exp_r,
        offdiag_final=float(abs(rho_r[0, 1])),
        rho_initial=rho0,
        rho_R=rho_r,
        rho_M=rho_m,
        qsd=qsd_outcome,
    )


def _run_qsd_branch(
    p: CounterexampleParams,
    a0: float,
    gen: GeneratorSet,
    rho_r: np.ndarray,
    a_op: np.ndarray,
) -> QsdOutcome:
    settings = p.qsd
    if a0 == 0.0:
        step, steps = settings.step or 1.0, 0
    else:
        step = settings.step
        if step is None:
            step = 0.01 / p.gamma if p.gamma > 0.0 else a0
        steps = max(1, math.ceil(a0 / step))
        step = a0 / steps
    cfg = TrajectoryConfig(step=step, steps=steps, seed=settings.seed)
    rho_qsd = ensemble_density(initial_state_vector(), gen, cfg, settings.n_traj)
    return QsdOutcome(
        n_traj=settings.n_traj,
        seed=settings.seed,
        step=step,
        steps=steps,
        expectation=expectation(a_op, rho_qsd),
        distance_to_lindblad=trace_distance(rho_qsd, rho_r),
    )


def check_unitary_consistency(
    gen: GeneratorSet,
    beta: float,
    ell: float,
    psi0: np.ndarray,
    a_op: np.ndarray,
) -> ConsistencyReport:
    """Compare the two observers' expectations under purely unitary transport.

    The rest branch evolves psi0 along the offset to a0; the moving branch
    boosts psi0 at offset zero. Requires a vanishing dissipator and
    commuting (H, K_x): for non-commuting generators the transport would be
    path-ordering dependent, which is a different effect than observer
    inconsistency, so such inputs are refused.
    """
    if any(np.any(lk) for lk in gen.Ls):
        raise ValidationError("unitary consistency check requires a vanishing dissipator")
    psi0 = validate_state(psi0)
    k_x = gen.Ks[0] if gen.Ks else np.zeros_like(gen.H)
    comm = gen.H @ k_x - k_x @ gen.H
    defect = float(np.max(np.abs(comm)))
    scale = max(1.0, float(np.max(np.abs(gen.H))) * float(np.max(np.abs(k_x))))
    if defect > _COMMUTATOR_TOL * scale:
        raise NonCommutingGenerators(
            f"||[H, K]|| = {defect:.3e}: transport would be path-dependent"
        )

    a0 = coincidence_offset(ell, beta)
    u_offset = expm_generator(gen.H, a0)
    psi_rest = u_offset @ psi0
    psi_moving = boost_transport(psi0, gen, beta)

    deviation = abs(state_expectation(a_op, psi_rest) - state_expectation(a_op, psi_moving))
    path_a_then_n = boost_transport(psi_rest, gen, beta)
    path_n_then_a = u_offset @ psi_moving
    path_order_difference = float(np.linalg.norm(path_a_then_n - path_n_then_a))

    return ConsistencyReport(
        deviation=deviation,
        path_order_difference=path_order_difference,
        event=coincidence_event(ell, beta),
        plane_rest=Hyperplane(FourVector(1.0), a0),
        plane_moving=ObserverFrame(beta).simultaneity_plane(0.0),
        dissipative=False,
    )


def dissipative_consistency(
    p: CounterexampleParams, k_correction: np.ndarray | None = None
) -> ConsistencyReport:
    """The counter-example pipeline reported as a consistency deviation."""
    report = run_counterexample(p, k_correction)
    return ConsistencyReport(
        deviation=abs(report.discrepancy),
        path_order_difference=0.0,
        event=coincidence_event(p.ell, p.beta, p.c),
        plane_rest=Hyperplane(FourVector(1.0), report.a0),
        plane_moving=ObserverFrame(p.beta).simultaneity_plane(0.0),
        dissipative=True,
    )


@dataclass(frozen=True)
class SweepPoint:
    beta: float
    ell: float
    a0: float
    expectation_R: float
    expectation_M: float
    discrepancy: float


def sweep_velocity(
    p: CounterexampleParams,
    betas: list[float],
    k_correction: np.ndarray | None = None,
) -> list[SweepPoint]:
    """Counter-example discrepancy versus velocity at constant a0.

    Each beta gets ell rescaled to a0/beta so the coincidence offset (and
    with it the R branch) stays fixed while the boost correction shrinks;
    beta = 0 degenerates to a0 = 0 where both observers coincide.
    """
    if not betas:
        raise ValidationError("betas must be non-empty")
    a0 = coincidence_offset(p.ell, p.beta, p.c)
    if k_correction is not None:
        k_correction = as_complex(k_correction)
    rows = []
    for beta in betas:
        if beta == 0.0:
            point = replace(p, beta=0.0)
        else:
            if abs(beta) >= 1.0:
                raise SuperluminalBeta(f"|beta| = {abs(beta):.6g} >= 1")
            point = replace(p, beta=beta, ell=a0 * p.c / beta)
        report = run_counterexample(point, k_correction)
        rows.append(
            SweepPoint(
                beta=beta,
                ell=point.ell,
                a0=report.a0,
                expectation_R=report.expectation_R,
                expectation_M=report.expectation_M,
                discrepancy=report.discrepancy,
            )
        )
    return rows
