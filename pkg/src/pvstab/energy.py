"""Energy-method sufficient stability condition.

The linearized interface problem admits an a priori estimate whenever a
symmetric 42x42 quadratic form over the tangential-derivative stack

    Z = (dt U, dt V, d2 U, d2 V, d3 U, d3 V)

is positive definite.  The form is M = A0_blocks + E1 * Q0, where A0_blocks
is the block-diagonal symmetrizer of the two interior systems and Q0
collects the interface coupling terms: the front derivatives are resolved
through the noncharacteristic traces (possible exactly when the tangential
plasma and vacuum fields are non-collinear), the boundary integrals are
converted to volume integrals, and every normal derivative is eliminated
through the interior equations and the divergence identities.  The exact
coupling weight in the estimate is mu_hat = E1 + eps*(v2*Hv3 - v3*Hv2);
the definiteness test uses its leading term E1, which is what the
closed-form factor analysis below characterizes (the two coincide up to
O(eps) and mu_hat is reported alongside the form).

For the orthogonal-fields configuration (axial flow, plasma field along x3,
vacuum field along x2) positive definiteness reduces to four scalar
inequalities in (E1, Hv2, H3, v3); their characteristic polynomial factors
over y = (1-x)^2 are exposed for independent cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CollinearFields, ConsistencyViolation, NotOrthogonalFields
from .matrices import plasma_a0, secondary_b0
from .state import (
    EQ_TOL,
    CaseFlag,
    EquilibriumState,
    classify_case,
    is_collinear,
    tangential_field_det,
)

__all__ = [
    "PD_TOL",
    "BoundaryResolution",
    "EnergyForm",
    "PCasePolynomial",
    "StabilityVerdict",
    "StabilityResult",
    "boundary_resolution",
    "assemble_energy_form",
    "pcase_characteristic_poly",
    "posdef_margins",
    "static_threshold",
    "check_sufficient_stability",
]

# Positive-definiteness margin below which no verdict is claimed.
PD_TOL = 1e-9

# Z-stack layout: six blocks of sizes 8,6,8,6,8,6 for
# (dt U, dt V, d2 U, d2 V, d3 U, d3 V).
_U_COMP = {"p": 0, "v1": 1, "v2": 2, "v3": 3, "H1": 4, "H2": 5, "H3": 6, "S": 7}
_V_COMP = {"Hv1": 0, "Hv2": 1, "Hv3": 2, "E1": 3, "E2": 4, "E3": 5}
_U_BASE = {0: 0, 2: 14, 3: 28}  # derivative direction -> block offset
_V_BASE = {0: 8, 2: 22, 3: 36}


def _zu(beta, comp):
    return _U_BASE[beta] + _U_COMP[comp]


def _zv(beta, comp):
    return _V_BASE[beta] + _V_COMP[comp]


@dataclass(frozen=True)
class BoundaryResolution:
    """Front-derivative resolution through noncharacteristic traces.

    ``a_coeffs[beta, j]`` is the coefficient of the H1 trace (j=0) or the
    Hv1 trace (j=1) in the resolution of the front derivative
    (dt_phi, d2_phi, d3_phi)[beta]; the dt_phi row additionally carries the
    v1 trace with unit coefficient, which is handled separately.
    ``mu_hat`` is the scalar weight of the interface coupling,
    E1 + eps*(v2*Hv3 - v3*Hv2).
    """

    mu_hat: float
    a_coeffs: np.ndarray


@dataclass(frozen=True)
class EnergyForm:
    """The assembled 42x42 quadratic form M = A0 blocks + E1*Q0.

    ``mu_hat`` is the exact interface coupling weight (equal to E1 up to
    O(eps)); ``Q0`` is the weight-free coupling matrix so that callers can
    form A0 + w*Q0 for any weight w.
    """

    dimension: int
    M: np.ndarray
    min_eig: float
    mu_hat: float
    Q0: np.ndarray


@dataclass(frozen=True)
class PCasePolynomial:
    """Factorized characteristic polynomial for the orthogonal-fields case.

    ``factors`` holds four coefficient arrays (highest power first) of
    polynomials in y = (1-x)^2 whose product is the characteristic
    polynomial of the non-unit part of the energy form, up to the
    (1-x)^30 factor from the 30 uncoupled directions.
    """

    factors: tuple
    e1: float
    hv2: float
    h3: float
    v3: float

    def y_roots(self):
        """Roots of each factor in the y variable."""
        return [np.roots(f) for f in self.factors]

    def as_x_polynomial(self):
        """Expand the product over y = (1-x)^2 into a degree-12 polynomial in x."""
        y = np.poly1d([1.0, -2.0, 1.0])  # (1-x)^2
        out = np.poly1d([1.0])
        for f in self.factors:
            composed = np.poly1d([0.0])
            for c in f:
                composed = composed * y + c
            out = out * composed
        return out.coefficients


class StabilityVerdict(Enum):
    SUFFICIENT = "sufficient"
    NOT_SUFFICIENT = "not_sufficient"
    INDETERMINATE = "indeterminate"
    INAPPLICABLE = "inapplicable"


@dataclass(frozen=True)
class StabilityResult:
    """Outcome of the sufficient-stability check.

    ``inequalities`` carries the four closed-form margins (positive means
    satisfied) when the orthogonal-fields route applies, ``min_eig`` the
    smallest eigenvalue of the 42x42 form when the general route ran.
    """

    verdict: StabilityVerdict
    witness: str
    min_eig: float | None = None
    inequalities: np.ndarray | None = None


def boundary_resolution(state: EquilibriumState) -> BoundaryResolution:
    """Resolve the front derivatives through the H1, Hv1 and v1 traces.

    Requires non-collinear tangential fields: the 2x2 system expressing
    (d2_phi, d3_phi) from the field-alignment boundary conditions has
    determinant H2*Hv3 - H3*Hv2.
    """
    det = tangential_field_det(state)
    if abs(det) <= EQ_TOL:
        raise CollinearFields(
            "front-derivative resolution needs non-collinear tangential fields "
            f"(H2*Hv3 - H3*Hv2 = {det:.3e})"
        )
    _, H2, H3 = state.H_hat
    _, Hv2, Hv3 = state.Hv_hat
    v2, v3 = state.v_hat[1], state.v_hat[2]
    a = np.array([
        [(v3 * Hv2 - v2 * Hv3) / det, (v2 * H3 - v3 * H2) / det],
        [Hv3 / det, -H3 / det],
        [-Hv2 / det, H2 / det],
    ])
    mu = state.E_hat[0] + state.epsilon * (v2 * Hv3 - v3 * Hv2)
    return BoundaryResolution(mu_hat=mu, a_coeffs=a)


def _assemble_q0(state: EquilibriumState, a_coeffs: np.ndarray) -> np.ndarray:
    """Interface coupling matrix: every boundary product, volume-converted.

    Terms are accumulated so that (Q0 Z, Z) equals twice the sum of the
    listed products, matching the factor two on the boundary integrals.
    """
    q = np.zeros((42, 42))

    def add(c, i, j):
        q[i, j] += c
        q[j, i] += c

    cp = 1.0 / (state.rho_hat * state.a_hat ** 2)
    v2, v3 = state.v_hat[1], state.v_hat[2]

    # v1 * dt E1 term: convert to the volume, then eliminate d1 v1 through
    # the pressure row of the interior plasma system (forcing goes into the
    # estimate, not the form)
    add(1.0, _zu(2, "v1"), _zv(0, "E2"))
    add(1.0, _zu(3, "v1"), _zv(0, "E3"))
    for c, i in [
        (cp, _zu(0, "p")),
        (cp * v2, _zu(2, "p")),
        (1.0, _zu(2, "v2")),
        (cp * v3, _zu(3, "p")),
        (1.0, _zu(3, "v3")),
    ]:
        add(c, i, _zv(0, "E1"))

    # trace terms a1^beta * H1 * d_beta E1 and a2^beta * Hv1 * d_beta E1;
    # d1 H1 = -(d2 H2 + d3 H3); d1 Hv1 = +(d2 Hv2 + d3 Hv3);
    # d1 E1  = +(d2 E2 + d3 E3)
    for j, (zx, d1x_terms) in enumerate([
        (lambda k: _zu(k, "H1"),
         [(1.0, _zu(2, "H2")), (1.0, _zu(3, "H3"))]),     # = -d1 H1
        (lambda k: _zv(k, "Hv1"),
         [(-1.0, _zv(2, "Hv2")), (-1.0, _zv(3, "Hv3"))]),  # = -d1 Hv1
    ]):
        a0, a2, a3 = a_coeffs[:, j]
        # beta = 0: X*dtE1 -> d2X*dtE2 + d3X*dtE3 - d1X*dtE1
        add(a0, zx(2), _zv(0, "E2"))
        add(a0, zx(3), _zv(0, "E3"))
        for c, i in d1x_terms:
            add(a0 * c, i, _zv(0, "E1"))
        # beta = 2, 3: X*dkE1 -> dkX*(d2E2 + d3E3) - d1X*dkE1
        for a_k, k in ((a2, 2), (a3, 3)):
            add(a_k, zx(k), _zv(2, "E2"))
            add(a_k, zx(k), _zv(3, "E3"))
            for c, i in d1x_terms:
                add(a_k * c, i, _zv(k, "E1"))
    return q


def assemble_energy_form(state: EquilibriumState) -> EnergyForm:
    """Assemble M = A0 blocks + E1*Q0 over the 42-dimensional Z stack."""
    res = boundary_resolution(state)
    a0 = plasma_a0(state.rho_hat, state.a_hat)
    sb0 = secondary_b0(state.epsilon * state.v_hat)
    blocks = np.zeros((42, 42))
    for off, blk in ((0, a0), (8, sb0), (14, a0), (22, sb0), (28, a0), (36, sb0)):
        blocks[off:off + blk.shape[0], off:off + blk.shape[0]] = blk
    q0 = _assemble_q0(state, res.a_coeffs)
    m = blocks + state.E_hat[0] * q0
    return EnergyForm(
        dimension=42,
        M=m,
        min_eig=float(np.linalg.eigvalsh(m).min()),
        mu_hat=res.mu_hat,
        Q0=q0,
    )


def pcase_characteristic_poly(state: EquilibriumState) -> PCasePolynomial:
    """Factorized characteristic polynomial for the orthogonal-fields case.

    Valid only for axial flow with plasma field along x3 and vacuum field
    along x2; the four factors are polynomials in y = (1-x)^2.
    """
    if classify_case(state) is not CaseFlag.ORTHOGONAL_FIELDS:
        raise NotOrthogonalFields(
            "characteristic factorization requires the orthogonal-fields "
            f"configuration, got {classify_case(state).value}"
        )
    e1 = state.E_hat[0]
    hv2 = state.Hv_hat[1]
    h3 = state.H_hat[2]
    v3 = state.v_hat[2]
    e2 = e1 * e1
    f1 = np.array([1.0, -2.0 * e2 / hv2 ** 2])
    f2 = np.array([1.0, -e2 * (1.0 + v3 ** 2 / h3 ** 2)])
    f3 = np.polysub(
        np.polymul([1.0, -e2],
                   [1.0, -2.0 * e2 * (hv2 ** 2 + h3 ** 2) / (hv2 ** 2 * h3 ** 2)]),
        v3 ** 2 * e2 / h3 ** 2 * np.array([1.0, -2.0 * e2 / hv2 ** 2]),
    )
    f4 = np.polysub(
        np.polymul([1.0, 0.0], [1.0, -2.0 * e2 * (1.0 + v3 ** 2) / h3 ** 2]),
        e2 * (3.0 + v3 ** 2) * np.array([1.0, -2.0 * e2 / h3 ** 2]),
    )
    return PCasePolynomial(factors=(f1, f2, f3, f4), e1=e1, hv2=hv2, h3=h3, v3=v3)


def posdef_margins(e1, hv2, h3, v3) -> np.ndarray:
    """Margins of the four closed-form inequalities; positive means satisfied.

    Each margin is the corresponding factor polynomial evaluated at y = 1,
    so positivity says the factor's roots lie below one.
    """
    e2 = e1 * e1
    return np.array([
        hv2 ** 2 / 2.0 - e2,
        1.0 - e2 * (1.0 + v3 ** 2 / h3 ** 2),
        2.0 * e2 ** 2 * (hv2 ** 2 + h3 ** 2 + v3 ** 2) / (h3 ** 2 * hv2 ** 2)
        - e2 * (1.0 + 2.0 * (h3 ** 2 + hv2 ** 2) / (h3 ** 2 * hv2 ** 2) + v3 ** 2 / h3 ** 2)
        + 1.0,
        2.0 * e2 ** 2 * (3.0 + v3 ** 2) / h3 ** 2
        - e2 * (3.0 + v3 ** 2 + 2.0 * (1.0 + v3 ** 2) / h3 ** 2)
        + 1.0,
    ])


def static_threshold(hv2, h3) -> float:
    """Closed-form squared-field threshold for axial-flow-free configurations.

    With zero tangential velocity the four inequalities collapse to
    E1^2 < min(1/3, hv2^2*h3^2 / (2*(hv2^2 + h3^2))).
    """
    return min(1.0 / 3.0, hv2 ** 2 * h3 ** 2 / (2.0 * (hv2 ** 2 + h3 ** 2)))


_INEQ_NAMES = (
    "E1^2 < Hv2^2/2",
    "E1^2*(1 + v3^2/H3^2) < 1",
    "first quartic inequality in E1^2",
    "second quartic inequality in E1^2",
)


def check_sufficient_stability(state: EquilibriumState) -> StabilityResult:
    """Decide the sufficient stability condition for a validated state.

    Orthogonal-fields states use the four closed-form inequalities (and for
    zero axial velocity the equivalent single threshold, cross-checked);
    other non-collinear states use the smallest eigenvalue of the assembled
    42x42 form.  Collinear tangential fields make the method inapplicable.
    Margins inside +-PD_TOL give Indeterminate rather than a guess.
    """
    if is_collinear(state):
        return StabilityResult(
            verdict=StabilityVerdict.INAPPLICABLE,
            witness="tangential plasma and vacuum fields are collinear; "
                    "the front-derivative resolution does not exist",
        )
    if classify_case(state) is CaseFlag.ORTHOGONAL_FIELDS:
        e1 = state.E_hat[0]
        hv2 = state.Hv_hat[1]
        h3 = state.H_hat[2]
        v3 = state.v_hat[2]
        margins = posdef_margins(e1, hv2, h3, v3)
        worst = int(np.argmin(margins))
        if np.all(margins > PD_TOL):
            verdict = StabilityVerdict.SUFFICIENT
            witness = (f"all four inequalities hold; tightest is "
                       f"{_INEQ_NAMES[worst]} with margin {margins[worst]:.6g}")
        elif margins[worst] < -PD_TOL:
            failed = int(np.argmax(margins < -PD_TOL))
            verdict = StabilityVerdict.NOT_SUFFICIENT
            witness = (f"{_INEQ_NAMES[failed]} fails "
                       f"with margin {margins[failed]:.6g}")
        else:
            verdict = StabilityVerdict.INDETERMINATE
            witness = (f"margin of {_INEQ_NAMES[worst]} is {margins[worst]:.3e}, "
                       f"inside the +-{PD_TOL:g} band")
        if abs(v3) <= EQ_TOL:
            closed = static_threshold(hv2, h3) - e1 * e1
            if abs(closed) > PD_TOL and verdict is not StabilityVerdict.INDETERMINATE:
                agrees = (closed > 0) == (verdict is StabilityVerdict.SUFFICIENT)
                if not agrees:
                    raise ConsistencyViolation(
                        "four-inequality verdict disagrees with the static "
                        f"closed form (margin {closed:.6g})"
                    )
        return StabilityResult(verdict=verdict, witness=witness, inequalities=margins)

    form = assemble_energy_form(state)
    if form.min_eig > PD_TOL:
        verdict = StabilityVerdict.SUFFICIENT
        witness = f"42x42 energy form is positive definite (min eigenvalue {form.min_eig:.6g})"
    elif form.min_eig < -PD_TOL:
        verdict = StabilityVerdict.NOT_SUFFICIENT
        witness = f"42x42 energy form is not positive definite (min eigenvalue {form.min_eig:.6g})"
    else:
        verdict = StabilityVerdict.INDETERMINATE
        witness = (f"smallest eigenvalue {form.min_eig:.3e} lies inside "
                   f"the +-{PD_TOL:g} band")
    return StabilityResult(verdict=verdict, witness=witness, min_eig=form.min_eig)
