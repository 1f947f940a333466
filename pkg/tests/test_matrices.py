import numpy as np
import pytest
from hypothesis import given, strategies as st

from pvstab.errors import HyperbolicityViolated
from pvstab.matrices import (
    PlaneWave,
    build_boundary_matrix,
    build_plasma_matrices,
    build_secondary_symmetrizer,
    build_vacuum_matrices,
    plane_wave_residual,
    plasma_a0,
    plasma_aj,
    secondary_b0,
    secondary_bj,
    vacuum_b_blocks,
)
from pvstab.state import make_interface_state, with_fields

RNG_SEED = 20260815


def _literal_plasma(j, rho, a, v, H):
    """Independent construction of A_j: the full entry tables, written out."""
    v1, v2, v3 = v
    H1, H2, H3 = H
    w = v[j]
    if j == 0:
        return np.array([
            [w / (rho * a * a), 1, 0, 0, 0, 0, 0, 0],
            [1, rho * w, 0, 0, 0, H2, H3, 0],
            [0, 0, rho * w, 0, 0, -H1, 0, 0],
            [0, 0, 0, rho * w, 0, 0, -H1, 0],
            [0, 0, 0, 0, w, 0, 0, 0],
            [0, H2, -H1, 0, 0, w, 0, 0],
            [0, H3, 0, -H1, 0, 0, w, 0],
            [0, 0, 0, 0, 0, 0, 0, w],
        ], dtype=float)
    if j == 1:
        return np.array([
            [w / (rho * a * a), 0, 1, 0, 0, 0, 0, 0],
            [0, rho * w, 0, 0, -H2, 0, 0, 0],
            [1, 0, rho * w, 0, H1, 0, H3, 0],
            [0, 0, 0, rho * w, 0, 0, -H2, 0],
            [0, -H2, H1, 0, w, 0, 0, 0],
            [0, 0, 0, 0, 0, w, 0, 0],
            [0, 0, H3, -H2, 0, 0, w, 0],
            [0, 0, 0, 0, 0, 0, 0, w],
        ], dtype=float)
    return np.array([
        [w / (rho * a * a), 0, 0, 1, 0, 0, 0, 0],
        [0, rho * w, 0, 0, -H3, 0, 0, 0],
        [0, 0, rho * w, 0, 0, -H3, 0, 0],
        [1, 0, 0, rho * w, H1, H2, 0, 0],
        [0, -H3, 0, H1, w, 0, 0, 0],
        [0, 0, -H3, H2, 0, w, 0, 0],
        [0, 0, 0, 0, 0, 0, w, 0],
        [0, 0, 0, 0, 0, 0, 0, w],
    ], dtype=float)


def test_plasma_matrices_match_literal_tables():
    rho, a = 1.3, 0.9
    v = np.array([0.2, -0.4, 0.7])
    H = np.array([0.5, -1.1, 0.8])
    for j in range(3):
        assert np.array_equal(plasma_aj(j, rho, a, v, H), _literal_plasma(j, rho, a, v, H))


def test_a0_is_identity_under_normalization():
    assert np.array_equal(plasma_a0(1.0, 1.0), np.eye(8))
    s = make_interface_state(Hv2=1.0)
    assert np.array_equal(build_plasma_matrices(s).A0, np.eye(8))


def test_plasma_symmetry_exact():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(100):
        rho, a = rng.uniform(0.1, 3.0, size=2)
        v, H = rng.normal(size=3), rng.normal(size=3)
        for j in range(3):
            A = plasma_aj(j, rho, a, v, H)
            assert np.array_equal(A, A.T)


def test_a1hat_spectrum_axial_field():
    # H = (0, 0, 1): the normal matrix couples (p, v1, H3) only
    s = make_interface_state(H3=1.0, Hv2=0.5)
    mats = build_plasma_matrices(s)
    eigs = np.sort(np.linalg.eigvalsh(mats.A1_hat))
    expected = np.array([-np.sqrt(2), 0, 0, 0, 0, 0, 0, np.sqrt(2)])
    assert np.allclose(eigs, expected, atol=1e-12)


def test_a1hat_inertia_on_random_interface_states():
    # one positive, one negative, six zero eigenvalues for every admissible
    # state, at +-sqrt(1 + H2^2 + H3^2); a moving front does not change this
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(200):
        kappa = -rng.uniform(0, 0.5)
        s = make_interface_state(
            E1=rng.normal(), Hv2=rng.normal(), Hv3=rng.normal(),
            H2=rng.normal(), H3=rng.normal(),
            v2=rng.uniform(-0.5, 0.5), v3=rng.uniform(-0.5, 0.5),
            kappa=kappa, epsilon=rng.uniform(1e-6, 0.9),
        )
        mats = build_plasma_matrices(s)
        eigs = np.sort(np.linalg.eigvalsh(mats.A1_hat))
        lam = np.sqrt(1.0 + s.H_hat[1] ** 2 + s.H_hat[2] ** 2)
        assert np.allclose(eigs, [-lam, 0, 0, 0, 0, 0, 0, lam], atol=1e-10)


def test_tangential_hat_matrices_equal_plain():
    s = make_interface_state(H2=0.3, H3=1.0, Hv2=0.5, v3=0.2, kappa=-0.1, epsilon=0.2)
    mats = build_plasma_matrices(s)
    assert np.array_equal(mats.A2_hat, mats.A2)
    assert np.array_equal(mats.A3_hat, mats.A3)
    assert np.array_equal(mats.A1_hat, mats.A1 - s.kappa * mats.A0)


def test_vacuum_blocks_literal():
    b1, b2, b3 = vacuum_b_blocks()
    assert np.array_equal(b1, [[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    assert np.array_equal(b2, [[0, 0, 1], [0, 0, 0], [-1, 0, 0]])
    assert np.array_equal(b3, [[0, -1, 0], [1, 0, 0], [0, 0, 0]])


def test_vacuum_matrices_structure_and_symmetry():
    s = make_interface_state(Hv2=1.0)
    mats = build_vacuum_matrices(s)
    for B in (mats.B1, mats.B2, mats.B3):
        assert np.array_equal(B, B.T)
        assert np.array_equal(B[:3, :3], np.zeros((3, 3)))
        assert np.array_equal(B[3:, 3:], np.zeros((3, 3)))


def _curl(G):
    """curl of the linear field x -> G @ x."""
    return np.array([G[2, 1] - G[1, 2], G[0, 2] - G[2, 0], G[1, 0] - G[0, 1]])


def test_vacuum_action_is_curl_pair():
    # For a linear field V(x) = G x, sum_j B_j dj V must equal
    # (curl E, -curl Hv).  Checked on a random batch of gradients.
    s = make_interface_state(Hv2=1.0)
    mats = build_vacuum_matrices(s)
    Bs = (mats.B1, mats.B2, mats.B3)
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        G = rng.normal(size=(6, 3))
        action = sum(B @ G[:, j] for j, B in enumerate(Bs))
        expected = np.concatenate([_curl(G[3:]), -_curl(G[:3])])
        assert np.allclose(action, expected, atol=1e-14)


def test_vacuum_action_example_field():
    # E = (x2, 0, 0), Hv = 0: curl E = (0, 0, -1), so the third magnetic row
    # of the first-order action is -1 and every other row vanishes
    s = make_interface_state(Hv2=1.0)
    mats = build_vacuum_matrices(s)
    G = np.zeros((6, 3))
    G[3, 1] = 1.0
    action = sum(B @ G[:, j] for j, B in enumerate((mats.B1, mats.B2, mats.B3)))
    assert np.array_equal(action, [0, 0, -1, 0, 0, 0])


def test_b1hat_diagonal_and_determinant():
    s = make_interface_state(Hv2=1.0, kappa=-0.1, epsilon=1e-6,
                             v2=0.0, v3=0.0)
    mats = build_vacuum_matrices(s)
    assert np.allclose(np.diag(mats.B1_hat), -1e-7, atol=0)
    assert np.array_equal(mats.B1_hat, -1e-7 * np.eye(6) - mats.B1)
    # the interface matrix is nonsingular whenever the front recedes:
    # det = (eps*kappa)^2 ((eps*kappa)^2 - 1)^2
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        kappa = -rng.uniform(1e-3, 1.0)
        eps = rng.uniform(1e-4, 0.99)
        st2 = make_interface_state(Hv2=1.0, kappa=kappa, epsilon=eps)
        d = np.linalg.det(build_vacuum_matrices(st2).B1_hat)
        pred = (eps * kappa) ** 2 * ((eps * kappa) ** 2 - 1) ** 2
        assert d != 0.0
        assert np.isclose(d, pred, rtol=1e-9)


def test_secondary_at_zero_mixing():
    mats = build_secondary_symmetrizer(np.zeros(3))
    s = make_interface_state(Hv2=1.0)
    vac = build_vacuum_matrices(s)
    assert np.array_equal(mats.SB0, np.eye(6))
    assert np.array_equal(mats.SB1, vac.B1)
    assert np.array_equal(mats.SB2, vac.B2)
    assert np.array_equal(mats.SB3, vac.B3)


def _literal_secondary(nu):
    """The four mixed matrices written out entry by entry."""
    n1, n2, n3 = nu
    sb0 = np.array([
        [1, 0, 0, 0, n3, -n2],
        [0, 1, 0, -n3, 0, n1],
        [0, 0, 1, n2, -n1, 0],
        [0, -n3, n2, 1, 0, 0],
        [n3, 0, -n1, 0, 1, 0],
        [-n2, n1, 0, 0, 0, 1],
    ], dtype=float)
    sb1 = np.array([
        [n1, n2, n3, 0, 0, 0],
        [n2, -n1, 0, 0, 0, -1],
        [n3, 0, -n1, 0, 1, 0],
        [0, 0, 0, n1, n2, n3],
        [0, 0, 1, n2, -n1, 0],
        [0, -1, 0, n3, 0, -n1],
    ], dtype=float)
    sb2 = np.array([
        [-n2, n1, 0, 0, 0, 1],
        [n1, n2, n3, 0, 0, 0],
        [0, n3, -n2, -1, 0, 0],
        [0, 0, -1, -n2, n1, 0],
        [0, 0, 0, n1, n2, n3],
        [1, 0, 0, 0, n3, -n2],
    ], dtype=float)
    sb3 = np.array([
        [-n3, 0, n1, 0, -1, 0],
        [0, -n3, n2, 1, 0, 0],
        [n1, n2, n3, 0, 0, 0],
        [0, 1, 0, -n3, 0, n1],
        [-1, 0, 0, 0, -n3, n2],
        [0, 0, 0, n1, n2, n3],
    ], dtype=float)
    return sb0, sb1, sb2, sb3


def test_secondary_matches_literal_tables():
    nu = np.array([0.2, -0.3, 0.4])
    lit0, lit1, lit2, lit3 = _literal_secondary(nu)
    mats = build_secondary_symmetrizer(nu)
    assert np.array_equal(mats.SB0, lit0)
    assert np.array_equal(mats.SB1, lit1)
    assert np.array_equal(mats.SB2, lit2)
    assert np.array_equal(mats.SB3, lit3)


def test_secondary_symmetry():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(100):
        nu = rng.normal(size=3)
        nu *= rng.uniform(0, 0.99) / np.linalg.norm(nu)
        mats = build_secondary_symmetrizer(nu)
        for M in (mats.SB0, mats.SB1, mats.SB2, mats.SB3):
            assert np.array_equal(M, M.T)


def test_secondary_b0_spectrum():
    mats = build_secondary_symmetrizer(np.array([0.3, 0.0, 0.0]))
    eigs = np.sort(np.linalg.eigvalsh(mats.SB0))
    assert np.allclose(eigs, [0.7, 0.7, 1.0, 1.0, 1.3, 1.3], atol=1e-12)


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_secondary_b0_spectrum_closed_form(n1, n2, n3):
    nu = np.array([n1, n2, n3])
    r = np.linalg.norm(nu)
    if r >= 1.0:
        return
    eigs = np.sort(np.linalg.eigvalsh(secondary_b0(nu)))
    assert np.allclose(eigs, [1 - r, 1 - r, 1, 1, 1 + r, 1 + r], atol=1e-12)


def test_secondary_rejects_inadmissible_nu():
    with pytest.raises(HyperbolicityViolated):
        build_secondary_symmetrizer(np.array([1.0, 0.0, 0.0]))
    with pytest.raises(HyperbolicityViolated):
        build_secondary_symmetrizer(np.array([0.8, 0.8, 0.0]))


def test_secondary_positivity_flips_at_unit_norm():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(20):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        inside = secondary_b0(direction * (1 - 1e-6))
        outside = secondary_b0(direction * (1 + 1e-6))
        assert np.linalg.eigvalsh(inside).min() > 0
        assert np.linalg.eigvalsh(outside).min() < 0


def test_boundary_matrix_construction():
    s = make_interface_state(Hv2=1.0, kappa=-0.2, epsilon=0.3)
    vac = build_vacuum_matrices(s)
    bm = build_boundary_matrix(-0.2, 0.0, 0.0, 0.3)
    # at a flat front moving with the interface this is exactly B1_hat
    assert np.allclose(bm.Bfrak, vac.B1_hat, atol=0)
    bm2 = build_boundary_matrix(0.1, -0.4, 0.7, 0.3)
    expected = 0.3 * 0.1 * np.eye(6) - vac.B1 - 0.4 * vac.B2 + 0.7 * vac.B3
    assert np.allclose(bm2.Bfrak, expected, atol=0)
    assert np.array_equal(bm2.Bfrak, bm2.Bfrak.T)


def test_boundary_matrix_spectrum_closed_form():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(300):
        pt, p2, p3 = rng.uniform(-3, 3, size=3)
        eps = rng.uniform(1e-4, 0.999)
        bm = build_boundary_matrix(pt, p2, p3, eps)
        num = np.sort(np.linalg.eigvalsh(bm.Bfrak))
        assert np.allclose(num, np.sort(bm.eigenvalues), atol=1e-10)
        e = eps * pt
        sq = np.sqrt(1 + p2 ** 2 + p3 ** 2)
        assert np.allclose(np.sort(bm.eigenvalues),
                           [e - sq, e - sq, e, e, e + sq, e + sq], atol=0)


def test_boundary_matrix_noncharacteristic_signs():
    # for eps*|dt_phi| < 1 exactly two positive and two negative eigenvalues
    # plus the double eps*dt_phi eigenvalue: the boundary is noncharacteristic
    # with a fixed signature
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(300):
        eps = rng.uniform(1e-4, 0.999)
        pt = rng.uniform(-1, 1) / eps * rng.uniform(0, 0.999)
        p2, p3 = rng.uniform(-3, 3, size=2)
        bm = build_boundary_matrix(pt, p2, p3, eps)
        eigs = np.sort(bm.eigenvalues)
        assert eigs[0] < 0 and eigs[1] < 0
        assert eigs[4] > 0 and eigs[5] > 0


def _transverse_wave(rng):
    k = rng.normal(size=3)
    e = rng.normal(size=3)
    e -= (e @ k) / (k @ k) * k
    eps = rng.uniform(0.05, 0.95)
    omega = np.linalg.norm(k) / eps
    h = np.cross(k, e) / (eps * omega)
    return PlaneWave(omega=omega, k=k, Hbar=h, Ebar=e), eps


def test_plane_wave_residual_zero_for_transverse():
    # the stock example: k along x2, E along x3, eps*omega = |k|
    k = np.array([0.0, 1.0, 0.0])
    e = np.array([0.0, 0.0, 1.0])
    eps = 0.25
    wave = PlaneWave(omega=1.0 / eps, k=k, Hbar=np.cross(k, e), Ebar=e)
    assert plane_wave_residual(wave, np.zeros(3), eps) == 0.0
    assert plane_wave_residual(wave, np.array([0.3, 0.0, 0.0]), eps) == 0.0
    # random transverse waves stay in the kernel for every admissible nu
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(100):
        wave, eps = _transverse_wave(rng)
        nu = rng.normal(size=3)
        nu *= rng.uniform(0, 0.99) / np.linalg.norm(nu)
        assert plane_wave_residual(wave, nu, eps) < 1e-12


def test_plane_wave_residual_positive_off_shell():
    # longitudinal electric field: solves the primary Maxwell rows trivially
    # (k x E = 0 pairs with Hbar = 0) but violates the divergence constraint,
    # which only the mixed system sees
    wave = PlaneWave(omega=4.0, k=np.array([0.0, 1.0, 0.0]),
                     Hbar=np.zeros(3), Ebar=np.array([0.0, 1.0, 0.0]))
    assert plane_wave_residual(wave, np.zeros(3), 0.25) > 1e-3
    assert plane_wave_residual(wave, np.array([0.3, 0.0, 0.0]), 0.25) > 1e-3
    # wrong temporal frequency on an otherwise transverse wave
    rng = np.random.default_rng(RNG_SEED)
    wave, eps = _transverse_wave(rng)
    detuned = PlaneWave(omega=wave.omega * 1.1, k=wave.k, Hbar=wave.Hbar, Ebar=wave.Ebar)
    assert plane_wave_residual(detuned, np.zeros(3), eps) > 1e-3
