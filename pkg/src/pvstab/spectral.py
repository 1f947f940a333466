"""Normal-mode search: growing exponential solutions of the interface problem.

A mode ``exp(tau*t + xi_p*x1 + i(gamma', x'))`` in the plasma (``xi_v`` in
the vacuum) with Re tau > 0, Re xi_p < 0, Re xi_v < 0 certifies violent
(Hadamard-type) instability: rescaling produces arbitrarily fast growth.
The tangential wave vector is gamma' = (cos psi, sin psi).

Mode determinants are implemented for the axial-flow family (v1 = v2 = 0,
plasma tangential field along x3):

* general-angle determinant -- vacuum field along x2, static (v3 = 0),
  any psi;
* two-dimensional orthogonal-fields determinant -- vacuum field along x2,
  psi = 0, any v3 (the x3 direction drops out of a gamma_3 = 0 mode);
* two-dimensional collinear determinant -- vacuum tangential field along
  x3 (so the non-collinearity condition fails and the energy method does
  not apply), psi = 0.

Roots are found by clearing the two radicals into a polynomial, taking all
companion-matrix eigenvalues as candidates, Newton-refining each on the
unsquared determinant, and keeping those that satisfy the branch
constraints and residual bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from ._kernels import BRANCH_TOL, R_TOL, TAU_TOL
from .energy import StabilityVerdict, check_sufficient_stability
from .errors import DegenerateDenominator, UnsupportedCase
from .state import EQ_TOL, EquilibriumState

__all__ = [
    "TAU_TOL",
    "R_TOL",
    "BRANCH_TOL",
    "DeterminantVariant",
    "ModeProblem",
    "ModeRoot",
    "VerdictKind",
    "Verdict",
    "build_psi_grid",
    "select_variant",
    "dispersion_xi",
    "lopatinski_residual",
    "find_unstable_roots",
    "classify_point",
]


class DeterminantVariant(Enum):
    """Which mode-determinant equation applies."""

    H2HAT_ZERO = "collinear_2d"
    PCASE_2D = "orthogonal_2d"
    STATIC_GENERAL_ANGLE = "orthogonal_general_angle"


_VARIANT_CODE = {
    DeterminantVariant.STATIC_GENERAL_ANGLE: _kernels.VARIANT_LD,
    DeterminantVariant.PCASE_2D: _kernels.VARIANT_2D_ORTHOGONAL,
    DeterminantVariant.H2HAT_ZERO: _kernels.VARIANT_2D_COLLINEAR,
}


def _require_axial_family(state: EquilibriumState):
    if (abs(state.v_hat[0]) > EQ_TOL or abs(state.v_hat[1]) > EQ_TOL
            or abs(state.H_hat[1]) > EQ_TOL):
        raise UnsupportedCase(
            "mode determinants require axial flow with the plasma tangential "
            "field along x3 (v1 = v2 = H2 = 0)")


def select_variant(state: EquilibriumState) -> DeterminantVariant:
    """Pick the determinant equation matching the state's field geometry."""
    _require_axial_family(state)
    if abs(state.Hv_hat[1]) <= EQ_TOL:
        return DeterminantVariant.H2HAT_ZERO
    if abs(state.Hv_hat[2]) > EQ_TOL:
        raise UnsupportedCase(
            "no determinant equation covers a vacuum tangential field with "
            "both components nonzero")
    if abs(state.v_hat[2]) <= EQ_TOL:
        return DeterminantVariant.STATIC_GENERAL_ANGLE
    return DeterminantVariant.PCASE_2D


@dataclass(frozen=True)
class ModeProblem:
    """One determinant equation at one wave-vector angle."""

    state: EquilibriumState
    psi: float = 0.0
    variant: DeterminantVariant | None = None

    def __post_init__(self):
        _require_axial_family(self.state)
        if self.variant is None:
            object.__setattr__(self, "variant", select_variant(self.state))
        v, s = self.variant, self.state
        if v is DeterminantVariant.H2HAT_ZERO:
            if abs(s.Hv_hat[1]) > EQ_TOL:
                raise UnsupportedCase("collinear determinant requires Hv2 = 0")
        else:
            if abs(s.Hv_hat[2]) > EQ_TOL:
                raise UnsupportedCase(
                    "orthogonal-fields determinants require Hv3 = 0")
        if v is DeterminantVariant.STATIC_GENERAL_ANGLE:
            if abs(s.v_hat[2]) > EQ_TOL:
                raise UnsupportedCase(
                    "the general-angle determinant is derived for the static "
                    "case v3 = 0")
        elif abs(math.sin(self.psi)) > EQ_TOL:
            raise UnsupportedCase(
                "two-dimensional determinants require sin(psi) = 0")

    def _kernel_args(self):
        s = self.state
        return (_VARIANT_CODE[self.variant], s.E_hat[0], s.Hv_hat[1],
                s.Hv_hat[2], s.H_hat[2], s.epsilon)


@dataclass(frozen=True)
class ModeRoot:
    """A certified growing mode.

    ``residual`` is the raw complex determinant value at the refined root;
    ``valid`` holds the three branch flags (Re tau > 0, Re xi_p < 0,
    Re xi_v < 0), all true for any root this module reports.
    """

    tau: complex
    xi_p: complex
    xi_v: complex
    residual: complex
    valid: tuple

    @property
    def growth_rate(self) -> float:
        return self.tau.real


class VerdictKind(Enum):
    UNSTABLE = "unstable"
    NO_GROWING_MODE = "no_growing_mode"
    SUFFICIENTLY_STABLE = "sufficiently_stable"


@dataclass(frozen=True)
class Verdict:
    """Classification of a single equilibrium.

    UNSTABLE carries the certifying root and the angle where it was found.
    SUFFICIENTLY_STABLE means the energy-form condition held;
    NO_GROWING_MODE means neither a growing mode nor the sufficient
    condition was established.
    """

    kind: VerdictKind
    root: ModeRoot | None = None
    psi: float | None = None


def dispersion_xi(tau: complex, state: EquilibriumState, psi: float = 0.0):
    """Decaying normal wavenumbers (xi_p, xi_v) for a mode frequency tau.

    The plasma branch is xi_p = -sqrt(1 + tau^4 / ((1+H3^2) tau^2 +
    sin(psi)^2 H3^2)); when sin(psi)*H3 = 0 the exact reduction
    -sqrt(1 + tau^2/(1+H3^2)) is used, which also covers tau = 0.  The
    vacuum branch is xi_v = -sqrt(1 + eps^2 tau^2).  Principal square
    roots make Re xi <= 0 whenever Re tau > 0.
    """
    tau = complex(tau)
    h3sq = state.H_hat[2] ** 2
    sin_term = h3sq * math.sin(psi) ** 2
    if sin_term == 0.0:
        xi_p = -np.sqrt(1.0 + tau * tau / (1.0 + h3sq))
    else:
        denom = (1.0 + h3sq) * tau * tau + sin_term
        if denom == 0.0:
            raise DegenerateDenominator(
                f"plasma dispersion denominator vanishes at tau={tau}")
        xi_p = -np.sqrt(1.0 + tau ** 4 / denom)
    xi_v = -np.sqrt(1.0 + (state.epsilon * tau) ** 2)
    return complex(xi_p), complex(xi_v)


def lopatinski_residual(tau: complex, problem: ModeProblem) -> complex:
    """Unsquared determinant value r = B*xi_p - A*xi_v at tau.

    Zeros of r in Re tau > 0 (with decaying branches) are growing modes.
    The coefficient pairs (A, B) per variant:

    * orthogonal 2D / general angle:  A = tau^2 + H3^2 sin(psi)^2,
      B = E1^2 - Hv2^2 (eps^2 tau^2 + cos(psi)^2)
          - 2i eps tau E1 Hv2 sin(psi);
    * collinear 2D:  A = tau^2,  B = (E1 + i eps tau Hv3)^2.

    At psi = 0 the general-angle residual reduces exactly to the
    orthogonal-2D one.
    """
    code, e1, hv2, hv3, h3, eps = problem._kernel_args()
    r, _, _, _, _ = _kernels._residual_terms(
        complex(tau), code, e1, hv2, hv3, h3, eps,
        math.sin(problem.psi) if code == _kernels.VARIANT_LD else 0.0,
        math.cos(problem.psi) if code == _kernels.VARIANT_LD else 1.0)
    if not (np.isfinite(r.real) and np.isfinite(r.imag)):
        raise DegenerateDenominator(
            f"determinant undefined at tau={tau} (dispersion denominator)")
    return complex(r)


def _roots_from_arrays(taus, xips, xivs, ress, count):
    return [
        ModeRoot(tau=complex(taus[i]), xi_p=complex(xips[i]),
                 xi_v=complex(xivs[i]), residual=complex(ress[i]),
                 valid=(True, True, True))
        for i in range(count)
    ]


def find_unstable_roots(problem: ModeProblem) -> list:
    """All certified growing modes of one determinant at one angle.

    Sorted by decreasing growth rate (ties by increasing Im tau); empty
    list means no growing mode was found at this angle.
    """
    code, e1, hv2, hv3, h3, eps = problem._kernel_args()
    psi = problem.psi if code == _kernels.VARIANT_LD else 0.0
    taus, xips, xivs, ress, n = _kernels.roots_at_psi(
        code, e1, hv2, hv3, h3, eps, psi)
    return _roots_from_arrays(taus, xips, xivs, ress, n)


def build_psi_grid(step: float = 1e-2) -> np.ndarray:
    """Angle grid: pi/2 and 0 first (likeliest hits), then the lattice
    k*step over (0, 2*pi)."""
    if step <= 0:
        raise ValueError("psi step must be positive")
    n = int(math.floor(2.0 * math.pi / step))
    lattice = step * np.arange(1, n + 1)
    return np.concatenate(([math.pi / 2.0, 0.0], lattice))


def classify_point(state: EquilibriumState, psi_grid=None) -> Verdict:
    """Decide one equilibrium: growing mode, sufficient stability, or
    neither.

    The angle grid applies only to the general-angle variant; the
    two-dimensional variants are single-angle problems at psi = 0.  The
    scan stops at the first angle producing a certified root.
    """
    variant = select_variant(state)
    if variant is DeterminantVariant.STATIC_GENERAL_ANGLE:
        psis = build_psi_grid() if psi_grid is None else np.asarray(
            psi_grid, dtype=float)
    else:
        psis = np.array([0.0])
    code = _VARIANT_CODE[variant]
    s = state
    hit, tau, xip, xiv, res = _kernels.scan_psis(
        code, s.E_hat[0], s.Hv_hat[1], s.Hv_hat[2], s.H_hat[2], s.epsilon,
        psis)
    if hit >= 0:
        root = ModeRoot(tau=complex(tau), xi_p=complex(xip),
                        xi_v=complex(xiv), residual=complex(res),
                        valid=(True, True, True))
        return Verdict(kind=VerdictKind.UNSTABLE, root=root,
                       psi=float(psis[hit]))
    if check_sufficient_stability(state).verdict is StabilityVerdict.SUFFICIENT:
        return Verdict(kind=VerdictKind.SUFFICIENTLY_STABLE)
    return Verdict(kind=VerdictKind.NO_GROWING_MODE)
