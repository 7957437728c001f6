import math
import warnings

import numpy as np
import pytest

from qfoliation.dynamics import (
    GeneratorSet,
    TrajectoryConfig,
    boost_transport,
    coupling_norms,
    decohering_coupling,
    ensemble_density,
    ensemble_final_states,
    lindblad_exact_twolevel,
    lindblad_propagate,
    lindblad_rhs,
    liouvillian,
    qsd_step,
    qsd_trajectory,
)
from qfoliation.errors import (
    DimMismatch,
    MissingBoostGenerator,
    NonHermitianInput,
    StepTooLarge,
    SuperluminalBeta,
    ZeroNorm,
)
from qfoliation.linalg import (
    density_from_state,
    expm_generator,
    purity,
    trace_distance,
    validate_density,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)
PLUS_STATE = np.array([1.0, 1.0]) / math.sqrt(2.0)
PLUS_RHO = np.full((2, 2), 0.5, dtype=complex)
ZERO2 = np.zeros((2, 2), dtype=complex)


def decoherence_model(gamma=1.0):
    return GeneratorSet(H=ZERO2, Ls=(decohering_coupling(gamma),))


def random_model(rng, dim, n_ls=1, hermitian_ls=False):
    h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (h + h.conj().T)
    ls = []
    for _ in range(n_ls):
        lk = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        if hermitian_ls:
            lk = 0.5 * (lk + lk.conj().T)
        ls.append(0.5 * lk)
    return GeneratorSet(H=h, Ls=tuple(ls))


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


# -- GeneratorSet ---------------------------------------------------------------

def test_generator_set_rejects_non_hermitian_h():
    with pytest.raises(NonHermitianInput):
        GeneratorSet(H=np.array([[0, 1], [0, 0]], dtype=complex))


def test_generator_set_rejects_mismatched_dims():
    with pytest.raises(DimMismatch):
        GeneratorSet(H=ZERO2, Ls=(np.zeros((3, 3)),))
    with pytest.raises(DimMismatch):
        GeneratorSet(H=ZERO2, Ks=(np.zeros((3, 3)),))


def test_generator_set_rejects_too_many_boosts():
    with pytest.raises(ValueError):
        GeneratorSet(H=ZERO2, Ks=(ZERO2, ZERO2, ZERO2, ZERO2))


def test_generator_set_arrays_read_only():
    gen = decoherence_model()
    with pytest.raises(ValueError):
        gen.H[0, 0] = 1.0


def test_trajectory_config_validation():
    with pytest.raises(ValueError):
        TrajectoryConfig(step=0.0, steps=10)
    with pytest.raises(ValueError):
        TrajectoryConfig(step=0.1, steps=-1)
    assert TrajectoryConfig(step=0.5, steps=4).span == pytest.approx(2.0)


# -- Lindblad propagation ---------------------------------------------------------

def test_lindblad_matches_closed_form_strong_decoherence():
    gen = decoherence_model(1.0)
    rho = lindblad_propagate(PLUS_RHO, gen, 30.0, method="exact")
    assert abs(rho[0, 1]) == pytest.approx(0.5 * math.exp(-15.0), rel=1e-9)
    np.testing.assert_allclose(rho, np.diag([0.5, 0.5]), atol=2e-7)


@pytest.mark.parametrize("gamma_span", [0.0, 1.0, 5.0, 10.0, 30.0])
def test_lindblad_exact_vs_closed_form(gamma_span):
    gen = decoherence_model(1.0)
    rho = lindblad_propagate(PLUS_RHO, gen, gamma_span, method="exact")
    ref = lindblad_exact_twolevel(PLUS_RHO, 1.0, gamma_span)
    np.testing.assert_allclose(rho, ref, atol=1e-9)


def test_lindblad_unitary_when_no_couplings():
    gen = GeneratorSet(H=SZ)
    rho0 = density_from_state(np.array([0.6, 0.8]))
    rho = lindblad_propagate(rho0, gen, 7.3)
    assert purity(rho) == pytest.approx(1.0, abs=1e-10)
    u = expm_generator(SZ, 7.3)
    np.testing.assert_allclose(rho, u @ rho0 @ u.conj().T, atol=1e-12)


def test_lindblad_zero_span_identity():
    gen = decoherence_model()
    np.testing.assert_array_equal(lindblad_propagate(PLUS_RHO, gen, 0.0), PLUS_RHO)


def test_lindblad_rk4_matches_exact():
    gen = decoherence_model(1.0)
    exact = lindblad_propagate(PLUS_RHO, gen, 3.0, method="exact")
    rk4 = lindblad_propagate(PLUS_RHO, gen, 3.0, method="rk4", step=1e-3)
    assert trace_distance(rk4, exact) <= 1e-6


def test_lindblad_rk4_step_too_large():
    gen = decoherence_model(10.0)
    with pytest.raises(StepTooLarge, match="reduce step"):
        lindblad_propagate(PLUS_RHO, gen, 1.0, method="rk4", step=0.2)


def test_lindblad_rk4_requires_step():
    with pytest.raises(ValueError):
        lindblad_propagate(PLUS_RHO, decoherence_model(), 1.0, method="rk4")


def test_lindblad_rejects_unknown_method():
    with pytest.raises(ValueError):
        lindblad_propagate(PLUS_RHO, decoherence_model(), 1.0, method="magic")


def test_lindblad_dim_mismatch():
    with pytest.raises(DimMismatch):
        lindblad_propagate(np.eye(3) / 3, decoherence_model(), 1.0)


def test_lindblad_trace_and_positivity_random_models():
    rng = np.random.default_rng(20)
    for _ in range(25):
        dim = int(rng.integers(2, 5))
        gen = random_model(rng, dim, n_ls=int(rng.integers(1, 3)))
        rho0 = random_density(rng, dim)
        rho = lindblad_propagate(rho0, gen, float(rng.uniform(0.1, 2.0)), method="exact")
        assert abs(np.trace(rho).real - 1.0) <= 1e-9
        assert np.min(np.linalg.eigvalsh(rho)) >= -1e-8
        validate_density(rho)


def test_lindblad_rk4_trace_random_models():
    rng = np.random.default_rng(21)
    for _ in range(5):
        dim = int(rng.integers(2, 4))
        gen = random_model(rng, dim)
        rho0 = random_density(rng, dim)
        rho = lindblad_propagate(rho0, gen, 1.0, method="rk4", step=1e-3)
        assert abs(np.trace(rho).real - 1.0) <= 1e-6


def test_unital_purity_non_increasing():
    # Hermitian couplings make the channel unital; purity cannot grow
    rng = np.random.default_rng(22)
    for _ in range(10):
        gen = random_model(rng, 2, hermitian_ls=True)
        rho0 = random_density(rng, 2)
        last = purity(rho0)
        for span in (0.2, 0.5, 1.0):
            p = purity(lindblad_propagate(rho0, gen, span, method="exact"))
            assert p <= last + 1e-10
            last = p


def test_liouvillian_matches_rhs():
    rng = np.random.default_rng(23)
    gen = random_model(rng, 3, n_ls=2)
    rho = random_density(rng, 3)
    direct = lindblad_rhs(rho, gen)
    via_super = (liouvillian(gen) @ rho.reshape(-1)).reshape(3, 3)
    np.testing.assert_allclose(via_super, direct, atol=1e-12)


# -- closed-form two-level oracle ---------------------------------------------------

def test_twolevel_closed_form_strong_limit():
    out = lindblad_exact_twolevel(PLUS_RHO, 1.0, 30.0)
    np.testing.assert_allclose(out, np.diag([0.5, 0.5]), atol=2e-7)


def test_twolevel_closed_form_gamma_zero():
    np.testing.assert_array_equal(lindblad_exact_twolevel(PLUS_RHO, 0.0, 5.0), PLUS_RHO)


def test_twolevel_closed_form_half_life():
    out = lindblad_exact_twolevel(PLUS_RHO, 1.0, 2.0 * math.log(2.0))
    assert out[0, 1].real == pytest.approx(0.25, abs=1e-15)


def test_twolevel_closed_form_rejects_dim():
    with pytest.raises(DimMismatch):
        lindblad_exact_twolevel(np.eye(3) / 3, 1.0, 1.0)


# -- QSD stepping -----------------------------------------------------------------

def test_qsd_step_unitary_limit():
    gen = GeneratorSet(H=SX)
    h = 1e-3
    stepped = qsd_step(PLUS_STATE, gen, None, h)
    exact = expm_generator(SX, h) @ PLUS_STATE
    assert np.linalg.norm(stepped - exact) <= 2.0 * h**2


def test_qsd_step_eigenstate_fixed_point():
    gen = decoherence_model(4.0)
    up = np.array([1.0, 0.0], dtype=complex)
    for dxi in (np.array([0.3 + 0.1j]), np.array([-2.0 + 1.5j])):
        out = qsd_step(up, gen, dxi, 0.01)
        np.testing.assert_allclose(out, up, atol=1e-15)


def test_qsd_step_requires_noise_for_couplings():
    gen = decoherence_model()
    with pytest.raises(DimMismatch):
        qsd_step(PLUS_STATE, gen, None, 0.01)
    with pytest.raises(DimMismatch):
        qsd_step(PLUS_STATE, gen, np.zeros(2, dtype=complex), 0.01)


def test_qsd_step_zero_norm():
    # L = sigma_x, psi = |0>: drift is -psi/2 per unit step, so step = 2
    # with zero noise cancels the state exactly
    gen = GeneratorSet(H=ZERO2, Ls=(SX,))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ZeroNorm):
            qsd_step(np.array([1.0, 0.0]), gen, np.array([0.0 + 0.0j]), step=2.0)


def test_qsd_trajectory_zero_steps():
    gen = decoherence_model()
    path = qsd_trajectory(PLUS_STATE, gen, TrajectoryConfig(step=0.1, steps=0, seed=1))
    assert path.shape == (1, 2)
    np.testing.assert_array_equal(path[0], PLUS_STATE)


def test_qsd_trajectory_deterministic():
    gen = decoherence_model()
    cfg = TrajectoryConfig(step=0.01, steps=150, seed=77)
    a = qsd_trajectory(PLUS_STATE, gen, cfg)
    b = qsd_trajectory(PLUS_STATE, gen, cfg)
    np.testing.assert_array_equal(a, b)
    c = qsd_trajectory(PLUS_STATE, gen, TrajectoryConfig(step=0.01, steps=150, seed=78))
    assert not np.array_equal(a, c)


def test_qsd_trajectory_norms_when_renormalizing():
    gen = decoherence_model()
    path = qsd_trajectory(PLUS_STATE, gen, TrajectoryConfig(step=0.02, steps=200, seed=3))
    norms = np.linalg.norm(path, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-9)


def test_qsd_trajectory_unitary_overlap():
    h_norm = 1.0  # ||SX|| = 1
    gen = GeneratorSet(H=SX)
    steps = 1000
    cfg = TrajectoryConfig(step=1e-3 / h_norm, steps=steps, seed=5)
    path = qsd_trajectory(PLUS_STATE, gen, cfg)
    exact = expm_generator(SX, cfg.span) @ PLUS_STATE
    overlap = abs(np.vdot(exact, path[-1]))
    assert overlap >= 1.0 - 1e-6


def test_qsd_trajectory_warns_on_coarse_step():
    gen = decoherence_model(4.0)
    with pytest.warns(UserWarning, match="exceeds"):
        qsd_trajectory(PLUS_STATE, gen, TrajectoryConfig(step=0.1, steps=1, seed=0))


def test_qsd_reduction_frequencies():
    # strong decoherence collapses each trajectory onto an eigenstate; the
    # Lindblad diagonal (1/2, 1/2) fixes the frequencies
    gen = decoherence_model(1.0)
    cfg = TrajectoryConfig(step=0.1, steps=300, seed=2026)
    finals = ensemble_final_states(PLUS_STATE, gen, cfg, 400)
    p_up = np.abs(finals[:, 0]) ** 2
    collapsed = (p_up < 0.01) | (p_up > 0.99)
    assert collapsed.mean() > 0.95
    frac_up = (p_up > 0.5).mean()
    assert abs(frac_up - 0.5) <= 3.0 / math.sqrt(400)


# -- ensembles ---------------------------------------------------------------------

def test_ensemble_single_trajectory_projector():
    gen = decoherence_model()
    cfg = TrajectoryConfig(step=0.05, steps=40, seed=9)
    rho = ensemble_density(PLUS_STATE, gen, cfg, 1)
    path = qsd_trajectory(PLUS_STATE, gen, cfg, stream=0)
    np.testing.assert_allclose(rho, density_from_state(path[-1]), atol=1e-12)
    assert purity(rho) == pytest.approx(1.0, abs=1e-12)


def test_ensemble_row_matches_standalone_trajectory_bitwise():
    gen = decoherence_model()
    cfg = TrajectoryConfig(step=0.02, steps=100, seed=4)
    finals = ensemble_final_states(PLUS_STATE, gen, cfg, 30)
    for stream in (0, 7, 29):
        path = qsd_trajectory(PLUS_STATE, gen, cfg, stream=stream)
        np.testing.assert_array_equal(finals[stream], path[-1])


def test_ensemble_unitary_equals_expm_route():
    gen = GeneratorSet(H=SZ)
    cfg = TrajectoryConfig(step=1e-3, steps=500, seed=0)
    for n_traj in (1, 3):
        rho = ensemble_density(PLUS_STATE, gen, cfg, n_traj)
        psi = expm_generator(SZ, cfg.span) @ PLUS_STATE
        assert trace_distance(rho, density_from_state(psi)) <= 1e-6


def test_ensemble_converges_to_lindblad():
    gen = decoherence_model(1.0)
    cfg = TrajectoryConfig(step=0.01, steps=300, seed=20260808)
    ref = lindblad_exact_twolevel(PLUS_RHO, 1.0, 3.0)
    for n_traj, bound in ((100, 0.5), (1000, 5.0 / math.sqrt(1000))):
        rho = ensemble_density(PLUS_STATE, gen, cfg, n_traj)
        assert trace_distance(rho, ref) <= bound


def test_ensemble_norm_preserved_in_mean_without_renormalization():
    gen = decoherence_model(1.0)
    cfg = TrajectoryConfig(step=0.01, steps=3000, seed=20260808, renormalize=False)
    finals = ensemble_final_states(PLUS_STATE, gen, cfg, 500)
    mean_sq_norm = float(np.mean(np.abs(finals) ** 2)) * finals.shape[1]
    assert abs(mean_sq_norm - 1.0) <= 0.05


def test_ensemble_validates_output():
    gen = decoherence_model()
    rho = ensemble_density(PLUS_STATE, gen, TrajectoryConfig(step=0.05, steps=60, seed=8), 64)
    validate_density(rho)


# -- boost transport ----------------------------------------------------------------

def test_boost_zero_beta_identity():
    gen = GeneratorSet(H=ZERO2, Ks=(SY / 2,))
    np.testing.assert_array_equal(boost_transport(PLUS_RHO, gen, 0.0), PLUS_RHO)


def test_boost_zero_generator_identity():
    gen = GeneratorSet(H=ZERO2, Ks=(ZERO2,))
    np.testing.assert_array_equal(boost_transport(PLUS_RHO, gen, 0.3), PLUS_RHO)
    np.testing.assert_array_equal(boost_transport(PLUS_STATE, gen, 0.3), PLUS_STATE)


def test_boost_requires_generator():
    gen = GeneratorSet(H=ZERO2)
    with pytest.raises(MissingBoostGenerator):
        boost_transport(PLUS_RHO, gen, 0.1)


def test_boost_rejects_superluminal():
    gen = GeneratorSet(H=ZERO2, Ks=(SY / 2,))
    with pytest.raises(SuperluminalBeta):
        boost_transport(PLUS_RHO, gen, 1.0)


def test_boost_first_order_scaling():
    # density-matrix deviation is linear in beta: halving beta halves it
    gen = GeneratorSet(H=ZERO2, Ks=(SY / 2,))
    devs = []
    for beta in (0.02, 0.01, 0.005):
        rho = boost_transport(PLUS_RHO, gen, beta)
        devs.append(np.max(np.abs(rho - PLUS_RHO)))
    assert devs[0] / devs[1] == pytest.approx(2.0, abs=0.1)
    assert devs[1] / devs[2] == pytest.approx(2.0, abs=0.1)
    assert devs[1] <= 0.01 * 1.1  # O(beta) with commutator bound ~||[K, rho]||


def test_boost_unitarity_preserves_overlaps_and_traces():
    rng = np.random.default_rng(30)
    k = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    gen = GeneratorSet(H=np.zeros((3, 3)), Ks=(0.5 * (k + k.conj().T),))
    psi = rng.normal(size=3) + 1j * rng.normal(size=3)
    psi /= np.linalg.norm(psi)
    phi = rng.normal(size=3) + 1j * rng.normal(size=3)
    phi /= np.linalg.norm(phi)
    b_psi = boost_transport(psi, gen, 0.4)
    b_phi = boost_transport(phi, gen, 0.4)
    assert abs(np.vdot(b_psi, b_phi) - np.vdot(psi, phi)) <= 1e-10
    rho = random_density(rng, 3)
    b_rho = boost_transport(rho, gen, 0.4)
    assert abs(np.trace(b_rho) - np.trace(rho)) <= 1e-10
    assert purity(b_rho) == pytest.approx(purity(rho), abs=1e-10)


def test_boost_state_and_density_consistent():
    gen = GeneratorSet(H=ZERO2, Ks=(SY / 2,))
    psi_b = boost_transport(PLUS_STATE, gen, 0.2)
    rho_b = boost_transport(PLUS_RHO, gen, 0.2)
    np.testing.assert_allclose(density_from_state(psi_b), rho_b, atol=1e-12)


def test_coupling_norms():
    gen = decoherence_model(4.0)
    assert coupling_norms(gen) == [pytest.approx(4.0)]
