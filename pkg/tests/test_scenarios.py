import math
import warnings

import numpy as np
import pytest

from qfoliation.dynamics import GeneratorSet
from qfoliation.errors import (
    NonCommutingGenerators,
    SuperluminalBeta,
    ValidationError,
)
from qfoliation.foliation import contains_event
from qfoliation.linalg import (
    density_from_state,
    expectation,
    purity,
    validate_density,
)
from qfoliation.scenarios import (
    CounterexampleParams,
    QsdSettings,
    check_unitary_consistency,
    dissipative_consistency,
    initial_state,
    initial_state_vector,
    run_counterexample,
    spin_observable,
    sweep_velocity,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
ZERO2 = np.zeros((2, 2), dtype=complex)

HEADLINE = CounterexampleParams(beta=0.01, ell=3000.0, gamma=1.0)


# -- fixed operators ------------------------------------------------------------

def test_spin_observable_expectations():
    a = spin_observable()
    assert expectation(a, initial_state()) == pytest.approx(1.0, abs=1e-12)
    assert expectation(a, np.diag([0.5, 0.5])) == pytest.approx(0.0, abs=1e-12)


def test_spin_observable_squares_to_identity():
    a = spin_observable()
    np.testing.assert_array_equal(a @ a, np.eye(2))
    assert sorted(np.linalg.eigvalsh(a)) == pytest.approx([-1.0, 1.0])


def test_initial_state_is_valid_pure_superposition():
    rho = initial_state()
    validate_density(rho)
    assert purity(rho) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(rho, density_from_state(initial_state_vector()), atol=1e-15)


# -- parameter validation ----------------------------------------------------------

def test_params_reject_superluminal():
    with pytest.raises(SuperluminalBeta):
        CounterexampleParams(beta=1.5, ell=10.0, gamma=1.0)


def test_params_reject_bad_ell_gamma_method():
    with pytest.raises(ValidationError):
        CounterexampleParams(beta=0.1, ell=0.0, gamma=1.0)
    with pytest.raises(ValidationError):
        CounterexampleParams(beta=0.1, ell=1.0, gamma=-1.0)
    with pytest.raises(ValidationError):
        CounterexampleParams(beta=0.1, ell=1.0, gamma=1.0, method="euler")
    with pytest.raises(ValidationError):
        QsdSettings(n_traj=0, seed=1)


# -- the counter-example -------------------------------------------------------------

def test_counterexample_headline_numbers():
    report = run_counterexample(HEADLINE)
    assert report.a0 == pytest.approx(30.0)
    assert report.expectation_M == 1.0
    assert abs(report.expectation_R) <= 1e-6
    assert report.discrepancy == pytest.approx(1.0, abs=1e-6)
    assert report.offdiag_final == pytest.approx(0.5 * math.exp(-15.0), rel=1e-9)


def test_counterexample_observers_disagree_about_one_event():
    report = run_counterexample(HEADLINE)
    # the same event lies on both measurement hyperplanes
    from qfoliation.foliation import FourVector, Hyperplane, ObserverFrame

    event = FourVector(report.a0, HEADLINE.ell)
    assert contains_event(Hyperplane(FourVector(1.0), report.a0), event)
    assert contains_event(ObserverFrame(HEADLINE.beta).simultaneity_plane(0.0), event)


def test_counterexample_gamma_zero_is_consistent():
    report = run_counterexample(CounterexampleParams(beta=0.01, ell=3000.0, gamma=0.0))
    assert report.expectation_R == pytest.approx(1.0, abs=1e-12)
    assert report.expectation_M == 1.0
    assert abs(report.discrepancy) <= 1e-9


def test_counterexample_beta_zero_observers_coincide():
    report = run_counterexample(CounterexampleParams(beta=0.0, ell=3000.0, gamma=1.0))
    assert report.a0 == 0.0
    assert abs(report.discrepancy) <= 1e-9


def test_counterexample_warns_on_weak_reduction():
    with pytest.warns(UserWarning, match="reduction is incomplete"):
        run_counterexample(CounterexampleParams(beta=0.001, ell=3000.0, gamma=1.0))


def test_counterexample_discrepancy_closed_form_and_monotone():
    # discrepancy = 1 - exp(-gamma*a0/2) when the boost correction vanishes
    last = -1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for gamma_a0 in (0.0, 1.0, 5.0, 10.0, 30.0):
            p = CounterexampleParams(beta=0.01, ell=3000.0, gamma=gamma_a0 / 30.0)
            report = run_counterexample(p)
            expected = 1.0 - math.exp(-0.5 * gamma_a0)
            assert report.discrepancy == pytest.approx(expected, abs=1e-6)
            assert report.discrepancy >= last - 1e-12
            last = report.discrepancy


def test_counterexample_rk4_branch():
    p = CounterexampleParams(beta=0.01, ell=3000.0, gamma=1.0, method="rk4", step=1e-3)
    report = run_counterexample(p)
    assert report.discrepancy == pytest.approx(1.0, abs=1e-6)


def test_counterexample_purity_echo_matrices():
    report = run_counterexample(HEADLINE)
    validate_density(report.rho_initial)
    validate_density(report.rho_R)
    validate_density(report.rho_M)
    assert purity(report.rho_R) <= purity(report.rho_initial) + 1e-12
    np.testing.assert_array_equal(report.rho_M, initial_state())


@pytest.mark.filterwarnings("ignore:gamma")
def test_counterexample_qsd_branch():
    # short span keeps the ensemble cheap; the weak-reduction warning is expected
    p = CounterexampleParams(
        beta=0.01, ell=300.0, gamma=1.0, qsd=QsdSettings(n_traj=400, seed=20260808)
    )
    report = run_counterexample(p)
    assert report.qsd is not None
    assert report.qsd.n_traj == 400
    bound = 5.0 / math.sqrt(400)
    assert abs(report.qsd.expectation - report.expectation_R) <= bound
    assert report.qsd.distance_to_lindblad <= bound


# -- unitary consistency ---------------------------------------------------------------

def test_unitary_consistency_boost_only():
    # H = 0, K arbitrary, observable commuting with K
    gen = GeneratorSet(H=ZERO2, Ks=(SX / 2,))
    report = check_unitary_consistency(gen, beta=0.3, ell=50.0, psi0=initial_state_vector(), a_op=SX)
    assert report.deviation <= 1e-9
    assert report.path_order_difference <= 1e-9
    assert not report.dissipative


def test_unitary_consistency_offset_only():
    gen = GeneratorSet(H=SZ, Ks=(ZERO2,))
    psi0 = np.array([0.6, 0.8], dtype=complex)
    report = check_unitary_consistency(gen, beta=0.2, ell=40.0, psi0=psi0, a_op=SZ)
    assert report.deviation <= 1e-9
    assert report.path_order_difference <= 1e-9


def test_unitary_consistency_planes_share_the_event():
    gen = GeneratorSet(H=SZ, Ks=(ZERO2,))
    report = check_unitary_consistency(
        gen, beta=0.2, ell=40.0, psi0=initial_state_vector(), a_op=SZ
    )
    assert contains_event(report.plane_rest, report.event)
    assert contains_event(report.plane_moving, report.event)


def test_unitary_consistency_refuses_non_commuting():
    gen = GeneratorSet(H=SZ, Ks=(SY / 2,))
    with pytest.raises(NonCommutingGenerators):
        check_unitary_consistency(gen, 0.1, 10.0, initial_state_vector(), SX)


def test_unitary_consistency_refuses_dissipator():
    gen = GeneratorSet(H=ZERO2, Ls=(SX,))
    with pytest.raises(ValidationError, match="dissipator"):
        check_unitary_consistency(gen, 0.1, 10.0, initial_state_vector(), SX)


def test_dissipative_consistency_reports_the_violation():
    report = dissipative_consistency(HEADLINE)
    assert report.dissipative
    assert report.deviation == pytest.approx(1.0 - math.exp(-15.0), abs=1e-6)


# -- velocity sweep ----------------------------------------------------------------------

def test_sweep_zero_correction_rows_constant():
    rows = sweep_velocity(HEADLINE, [0.02, 0.01, 0.005])
    assert len(rows) == 3
    for row in rows:
        assert row.a0 == pytest.approx(30.0)
        assert row.discrepancy == pytest.approx(1.0, abs=1e-6)
        assert row.ell * row.beta == pytest.approx(30.0)


def test_sweep_single_beta_zero():
    rows = sweep_velocity(HEADLINE, [0.0])
    assert len(rows) == 1
    assert rows[0].a0 == 0.0
    assert abs(rows[0].discrepancy) <= 1e-9


def test_sweep_empty_betas_rejected():
    with pytest.raises(ValidationError):
        sweep_velocity(HEADLINE, [])


def test_sweep_with_boost_correction_closed_form():
    # the boosted expectation is cos(atanh(beta)) exactly: the initial state
    # is the observable's top eigenstate, so the deviation from 1 is
    # quadratic in beta (the linear term vanishes identically)
    rows = sweep_velocity(HEADLINE, [0.02, 0.01, 0.005], k_correction=SY / 2)
    for row in rows:
        expected = math.cos(math.atanh(row.beta)) - math.exp(-15.0)
        assert row.discrepancy == pytest.approx(expected, abs=1e-12)
    gaps = [abs(r.discrepancy - 1.0) for r in rows]
    assert gaps[0] / gaps[1] == pytest.approx(4.0, abs=0.1)
    assert gaps[1] / gaps[2] == pytest.approx(4.0, abs=0.1)
