import numpy as np
import pytest
from hypothesis import given, strategies as st

from pvstab.energy import (
    PD_TOL,
    StabilityVerdict,
    assemble_energy_form,
    boundary_resolution,
    check_sufficient_stability,
    pcase_characteristic_poly,
    posdef_margins,
    static_threshold,
)
from pvstab.errors import CollinearFields, NotOrthogonalFields
from pvstab.matrices import secondary_b0
from pvstab.state import make_interface_state

RNG_SEED = 20260815


def _random_noncollinear(rng, eps=None):
    while True:
        h2, h3, hv2, hv3 = rng.uniform(-2, 2, size=4)
        if abs(h2 * hv3 - h3 * hv2) > 1e-3:
            break
    return make_interface_state(
        E1=rng.uniform(-1, 1), Hv2=hv2, Hv3=hv3, H2=h2, H3=h3,
        v2=rng.uniform(-0.5, 0.5), v3=rng.uniform(-0.5, 0.5),
        kappa=-rng.uniform(0, 0.3),
        epsilon=eps if eps is not None else rng.uniform(1e-6, 0.3),
    )


def test_boundary_resolution_orthogonal_closed_form():
    b = boundary_resolution(make_interface_state(E1=0.0, Hv2=0.5, H3=1.0, v3=0.2))
    expected = np.array([[-0.2, 0.0], [0.0, 2.0], [1.0, 0.0]])
    assert np.allclose(b.a_coeffs, expected, atol=1e-15)


def test_boundary_resolution_reconstructs_front_derivatives():
    # dual route: pick front slopes, build the traces they induce, and check
    # the coefficients map the traces back to the slopes
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(100):
        s = _random_noncollinear(rng)
        b = boundary_resolution(s)
        d2, d3 = rng.normal(size=2)
        h1 = s.H_hat[1] * d2 + s.H_hat[2] * d3
        hv1 = s.Hv_hat[1] * d2 + s.Hv_hat[2] * d3
        traces = np.array([h1, hv1])
        assert np.isclose(b.a_coeffs[1] @ traces, d2, atol=1e-10)
        assert np.isclose(b.a_coeffs[2] @ traces, d3, atol=1e-10)
        # the time row carries the advective part (the v1 trace is separate)
        dt_minus_v1 = -s.v_hat[1] * d2 - s.v_hat[2] * d3
        assert np.isclose(b.a_coeffs[0] @ traces, dt_minus_v1, atol=1e-10)


def test_mu_hat():
    b = boundary_resolution(
        make_interface_state(E1=0.3, Hv2=1.0, H3=1.0, v3=0.5, epsilon=0.2))
    assert np.isclose(b.mu_hat, 0.3 - 0.2 * 0.5 * 1.0, atol=1e-15)
    # zero tangential velocity: the weight is the normal electric field alone
    b0 = boundary_resolution(make_interface_state(E1=0.7, Hv2=1.0, H3=1.0))
    assert b0.mu_hat == 0.7


def test_boundary_resolution_collinear_raises():
    s = make_interface_state(E1=0.0, H2=1.0, H3=2.0, Hv2=2.0, Hv3=4.0,
                             v2=0.1, epsilon=0.1)
    with pytest.raises(CollinearFields):
        boundary_resolution(s)


def test_energy_form_identity_at_zero_field_and_velocity():
    f = assemble_energy_form(make_interface_state(E1=0.0, Hv2=1.0, H3=1.0))
    assert f.dimension == 42
    assert np.allclose(f.M, np.eye(42), atol=0)
    assert f.min_eig == pytest.approx(1.0, abs=1e-14)
    assert f.mu_hat == 0.0


def test_energy_form_reduces_to_block_symmetrizer():
    # zero tangential velocity but a moving front: the coupling weight
    # vanishes and M is exactly the block-diagonal symmetrizer
    s = make_interface_state(E1=0.0, Hv2=1.0, H3=1.0, kappa=-0.4, epsilon=0.25)
    f = assemble_energy_form(s)
    sb0 = secondary_b0(s.epsilon * s.v_hat)
    expected = np.zeros((42, 42))
    for off, blk in ((0, np.eye(8)), (8, sb0), (14, np.eye(8)),
                     (22, sb0), (28, np.eye(8)), (36, sb0)):
        expected[off:off + blk.shape[0], off:off + blk.shape[0]] = blk
    assert np.allclose(f.M, expected, atol=0)
    assert f.min_eig == pytest.approx(1.0 - 0.25 * 0.4, abs=1e-12)


def test_energy_form_symmetric_exactly():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        f = assemble_energy_form(_random_noncollinear(rng))
        assert np.array_equal(f.M, f.M.T)
        assert np.array_equal(f.Q0, f.Q0.T)


def test_energy_spectrum_matches_closed_form_factors():
    # the central gate: for orthogonal-fields states the spectrum of
    # I + E1*Q0 must be thirty ones plus 1 +- sqrt(y) over the roots y of
    # the four closed-form factors
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        e1 = rng.uniform(-1.5, 1.5)
        hv2 = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
        h3 = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
        v3 = rng.uniform(-0.9, 0.9)
        s = make_interface_state(E1=e1, Hv2=hv2, H3=h3, v3=v3, epsilon=1e-12)
        form = assemble_energy_form(s)
        eigs = np.sort(np.linalg.eigvalsh(np.eye(42) + e1 * form.Q0))
        expected = [1.0] * 30
        for roots in pcase_characteristic_poly(s).y_roots():
            for y in roots:
                assert abs(np.imag(y)) < 1e-9
                r = np.sqrt(max(np.real(y), 0.0))
                expected.extend([1.0 - r, 1.0 + r])
        assert np.allclose(eigs, np.sort(expected), atol=1e-9)


def test_pcase_poly_requires_orthogonal_fields():
    s = make_interface_state(E1=0.1, Hv2=0.5, Hv3=0.2, H3=1.0, epsilon=0.1)
    with pytest.raises(NotOrthogonalFields):
        pcase_characteristic_poly(s)


def test_pcase_poly_zero_field_collapses():
    s = make_interface_state(E1=0.0, Hv2=1.0, H3=1.0)
    poly = pcase_characteristic_poly(s)
    # every factor reduces to a power of y: P(x) = (1-x)^12
    expected = np.poly1d([-1.0, 1.0]) ** 12
    assert np.allclose(poly.as_x_polynomial(), expected.coefficients, atol=1e-14)
    for roots in poly.y_roots():
        assert np.allclose(roots, 0.0, atol=1e-14)


def test_pcase_poly_first_factor_root():
    s = make_interface_state(E1=0.4, Hv2=1.0, H3=1.0)
    poly = pcase_characteristic_poly(s)
    roots = poly.y_roots()
    assert np.allclose(roots[0], [0.32], atol=1e-14)


def test_pcase_poly_roots_real_positive():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(500):
        s = make_interface_state(
            E1=rng.uniform(-2, 2) or 0.1,
            Hv2=rng.uniform(0.05, 2.0) * rng.choice([-1, 1]),
            H3=rng.uniform(0.05, 2.0) * rng.choice([-1, 1]),
            v3=rng.uniform(-0.95, 0.95),
        )
        if abs(s.E_hat[0]) < 1e-12:
            continue
        for roots in pcase_characteristic_poly(s).y_roots():
            assert np.all(np.abs(np.imag(roots)) < 1e-8)
            assert np.all(np.real(roots) > -1e-12)


def test_check_sufficient_stability_stock_examples():
    r = check_sufficient_stability(make_interface_state(E1=0.4, Hv2=1.0, H3=1.0))
    assert r.verdict is StabilityVerdict.SUFFICIENT
    assert r.inequalities is not None and np.all(r.inequalities > 0)
    r = check_sufficient_stability(make_interface_state(E1=0.6, Hv2=1.0, H3=1.0))
    assert r.verdict is StabilityVerdict.NOT_SUFFICIENT
    assert "margin" in r.witness


def test_check_sufficient_stability_zero_field_always_sufficient():
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        s = _random_noncollinear(rng)
        s = make_interface_state(
            E1=0.0, Hv2=s.Hv_hat[1], Hv3=s.Hv_hat[2], H2=s.H_hat[1],
            H3=s.H_hat[2], v2=s.v_hat[1], v3=s.v_hat[2], kappa=s.kappa,
            epsilon=s.epsilon)
        assert check_sufficient_stability(s).verdict is StabilityVerdict.SUFFICIENT


def test_check_sufficient_stability_collinear_inapplicable():
    s = make_interface_state(E1=0.2, H3=1.0, Hv3=0.5)
    r = check_sufficient_stability(s)
    assert r.verdict is StabilityVerdict.INAPPLICABLE
    assert r.min_eig is None and r.inequalities is None


def test_check_sufficient_stability_general_route():
    s = make_interface_state(E1=0.2, Hv2=0.8, Hv3=0.3, H2=0.4, H3=1.0,
                             v2=0.1, v3=0.2, epsilon=0.05)
    r = check_sufficient_stability(s)
    assert r.verdict is StabilityVerdict.SUFFICIENT
    assert r.min_eig is not None and r.min_eig > 0
    big = make_interface_state(E1=1.8, Hv2=0.8, Hv3=0.3, H2=0.4, H3=1.0,
                               v2=0.1, v3=0.2, epsilon=0.05)
    assert check_sufficient_stability(big).verdict is StabilityVerdict.NOT_SUFFICIENT


def test_indeterminate_band():
    # E1 = 0.5, Hv2 = H3 = 1: the first quartic margin is exactly zero
    r = check_sufficient_stability(make_interface_state(E1=0.5, Hv2=1.0, H3=1.0))
    assert r.verdict is StabilityVerdict.INDETERMINATE


def test_static_threshold_examples():
    assert static_threshold(1.0, 1.0) == 0.25
    assert static_threshold(10.0, 10.0) == pytest.approx(1.0 / 3.0)
    # threshold is symmetric and even in both fields
    assert static_threshold(-1.0, 1.0) == static_threshold(1.0, 1.0)


def test_static_monotonicity():
    # once sufficient, every smaller |E1| stays sufficient: immediate from
    # the closed form but asserted against the four-inequality route
    rng = np.random.default_rng(RNG_SEED)
    for _ in range(50):
        hv2 = rng.uniform(0.1, 2.0)
        h3 = rng.uniform(0.1, 2.0)
        thr = np.sqrt(static_threshold(hv2, h3))
        e1 = rng.uniform(0, thr * 0.98)
        for frac in (1.0, 0.5, 0.1):
            margins = posdef_margins(e1 * frac, hv2, h3, 0.0)
            assert np.all(margins > 0)


@given(
    e1=st.floats(-2, 2),
    hv2=st.floats(0.05, 2),
    h3=st.floats(0.05, 2),
    v3=st.floats(-0.95, 0.95),
)
def test_margins_even_in_field_signs(e1, hv2, h3, v3):
    m = posdef_margins(e1, hv2, h3, v3)
    assert np.allclose(m, posdef_margins(-e1, hv2, h3, v3), atol=0)
    assert np.allclose(m, posdef_margins(e1, -hv2, h3, v3), atol=0)
    assert np.allclose(m, posdef_margins(e1, hv2, -h3, -v3), atol=0)


def _roots_below_one(poly, band=PD_TOL):
    """True/False/None (None = some root within the band of 1)."""
    verdict = True
    for roots in poly.y_roots():
        for y in roots:
            y = np.real(y)
            if abs(y - 1.0) <= band:
                return None
            if y > 1.0:
                verdict = False
    return verdict


def test_equivalence_inequalities_vs_factor_roots():
    # the four margins and the root locations decide the same predicate
    rng = np.random.default_rng(RNG_SEED)
    checked = 0
    for _ in range(2000):
        e1 = rng.uniform(-1.5, 1.5)
        hv2 = rng.uniform(0.05, 2.0) * rng.choice([-1, 1])
        h3 = rng.uniform(0.05, 2.0) * rng.choice([-1, 1])
        v3 = rng.uniform(-0.95, 0.95)
        margins = posdef_margins(e1, hv2, h3, v3)
        if np.any(np.abs(margins) <= PD_TOL):
            continue
        s = make_interface_state(E1=e1, Hv2=hv2, H3=h3, v3=v3)
        by_roots = _roots_below_one(pcase_characteristic_poly(s))
        if by_roots is None:
            continue
        assert bool(np.all(margins > 0)) == by_roots
        checked += 1
    assert checked > 1500


def test_equivalence_min_eig_vs_factor_roots():
    # the assembled form and the closed-form factors decide the same
    # predicate once both margins clear the indeterminacy band
    rng = np.random.default_rng(RNG_SEED + 1)
    checked = 0
    for _ in range(400):
        e1 = rng.uniform(-1.2, 1.2)
        hv2 = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
        h3 = rng.uniform(0.1, 2.0) * rng.choice([-1, 1])
        v3 = rng.uniform(-0.9, 0.9)
        s = make_interface_state(E1=e1, Hv2=hv2, H3=h3, v3=v3, epsilon=1e-12)
        form = assemble_energy_form(s)
        if abs(form.min_eig) <= PD_TOL:
            continue
        by_roots = _roots_below_one(pcase_characteristic_poly(s))
        if by_roots is None:
            continue
        assert (form.min_eig > 0) == by_roots
        checked += 1
    assert checked > 300


def test_equivalence_static_closed_form():
    # with zero axial velocity the four inequalities collapse to the single
    # threshold on E1^2
    rng = np.random.default_rng(RNG_SEED + 2)
    checked = 0
    for _ in range(2000):
        e1 = rng.uniform(-1.5, 1.5)
        hv2 = rng.uniform(0.05, 2.0) * rng.choice([-1, 1])
        h3 = rng.uniform(0.05, 2.0) * rng.choice([-1, 1])
        margins = posdef_margins(e1, hv2, h3, 0.0)
        closed = static_threshold(hv2, h3) - e1 * e1
        if np.any(np.abs(margins) <= PD_TOL) or abs(closed) <= PD_TOL:
            continue
        assert bool(np.all(margins > 0)) == (closed > 0)
        checked += 1
    assert checked > 1500
