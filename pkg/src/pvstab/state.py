"""Planar plasma-vacuum interface equilibria.

An equilibrium is a piecewise-constant background: compressible-MHD plasma
occupying x1 > kappa*t, a vacuum electromagnetic field on the other side,
and a planar interface moving with normal speed kappa.  All fields are
nondimensionalized; ``epsilon`` is the ratio of a reference fluid speed to
the speed of light, so the vacuum side keeps the displacement current.

The interface admits an equilibrium only when the tangential fields and the
electric field satisfy algebraic compatibility relations; those are enforced
by :func:`validate_equilibrium`.  ``classify_case`` sorts a state into the
special configurations for which closed-form stability machinery exists.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import (
    EpsilonOutOfRange,
    ExpansionViolated,
    HyperbolicityViolated,
    InterfaceConstraintViolated,
    ValidationError,
)

# Absolute tolerance for every algebraic equality test on state components.
EQ_TOL = 1e-12

_JSON_KEYS = {"p", "v", "H", "Hv", "E", "S", "kappa", "epsilon", "rho", "a"}
_JSON_REQUIRED = {"p", "v", "H", "Hv", "E", "S", "kappa", "epsilon"}


class CaseFlag(enum.Enum):
    """Configuration classes, most specific first.

    ORTHOGONAL_FIELDS
        Flow along x3, plasma field along x3, vacuum field along x2, both
        tangential fields nonzero (hence mutually orthogonal).
    VACUUM_FIELD_ALONG_X3
        Flow and plasma field along x3, vacuum field along x3.
    FLOW_AND_FIELD_ALONG_X3
        Flow and plasma field along x3, vacuum field unrestricted.
    COLLINEAR
        Tangential plasma and vacuum fields collinear (their 2x2 determinant
        vanishes) without matching any of the above.
    GENERAL_NON_COLLINEAR
        Everything else.
    """

    ORTHOGONAL_FIELDS = "orthogonal_fields"
    VACUUM_FIELD_ALONG_X3 = "vacuum_field_along_x3"
    FLOW_AND_FIELD_ALONG_X3 = "flow_and_field_along_x3"
    COLLINEAR = "collinear"
    GENERAL_NON_COLLINEAR = "general_non_collinear"


@dataclass(frozen=True)
class EquilibriumState:
    """Constant background state on both sides of the interface.

    Attributes
    ----------
    p_hat : float
        Plasma pressure.
    v_hat : (3,) ndarray
        Plasma velocity; the normal component equals ``kappa``.
    H_hat : (3,) ndarray
        Plasma magnetic field; tangential to the interface.
    S_hat : float
        Entropy (carried through the system but dynamically inert).
    Hv_hat : (3,) ndarray
        Vacuum magnetic field; tangential to the interface.
    E_hat : (3,) ndarray
        Vacuum electric field; the tangential components are forced by the
        interface compatibility relations.
    kappa : float
        Interface normal speed (non-positive: the plasma does not compress
        the vacuum region).
    epsilon : float
        Reference-speed to light-speed ratio, 0 < epsilon < 1.
    rho_hat, a_hat : float
        Density and sound speed; both 1 under the default normalization.
    """

    p_hat: float
    v_hat: np.ndarray
    H_hat: np.ndarray
    S_hat: float
    Hv_hat: np.ndarray
    E_hat: np.ndarray
    kappa: float
    epsilon: float
    rho_hat: float = 1.0
    a_hat: float = 1.0

    def __post_init__(self):
        for name in ("v_hat", "H_hat", "Hv_hat", "E_hat"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (3,):
                raise ValidationError(f"{name} must be a 3-vector, got shape {arr.shape}")
            object.__setattr__(self, name, arr)
        for name in ("p_hat", "S_hat", "kappa", "epsilon", "rho_hat", "a_hat"):
            object.__setattr__(self, name, float(getattr(self, name)))


def forced_tangential_e(Hv_hat, kappa, epsilon):
    """Tangential electric field forced by the interface compatibility relations.

    Returns (E2, E3) = (eps*kappa*Hv3, -eps*kappa*Hv2).
    """
    return epsilon * kappa * Hv_hat[2], -epsilon * kappa * Hv_hat[1]


def validate_equilibrium(state: EquilibriumState) -> EquilibriumState:
    """Check every admissibility condition; return the state unchanged.

    Raises
    ------
    HyperbolicityViolated
        If rho_hat <= 0, a_hat <= 0, or epsilon*|v_hat| >= 1 (the secondary
        vacuum symmetrization would lose positivity).
    EpsilonOutOfRange
        If epsilon is not strictly inside (0, 1).
    ExpansionViolated
        If kappa > 0.
    InterfaceConstraintViolated
        If any compatibility relation fails by more than EQ_TOL: v1 = kappa,
        H1 = 0, Hv1 = 0, E2 = eps*kappa*Hv3, E3 = -eps*kappa*Hv2.
    """
    if state.rho_hat <= 0.0 or state.a_hat <= 0.0:
        raise HyperbolicityViolated(
            f"need rho_hat > 0 and a_hat > 0, got rho_hat={state.rho_hat}, a_hat={state.a_hat}"
        )
    if not (0.0 < state.epsilon < 1.0):
        raise EpsilonOutOfRange(f"epsilon must lie in (0, 1), got {state.epsilon}")
    speed = float(np.linalg.norm(state.v_hat))
    if state.epsilon * speed >= 1.0:
        raise HyperbolicityViolated(
            f"secondary hyperbolicity needs epsilon*|v_hat| < 1, got {state.epsilon * speed}"
        )
    if state.kappa > 0.0:
        raise ExpansionViolated(f"kappa must be <= 0, got {state.kappa}")

    e2, e3 = forced_tangential_e(state.Hv_hat, state.kappa, state.epsilon)
    checks = [
        ("v1 = kappa", state.v_hat[0] - state.kappa),
        ("H1 = 0", state.H_hat[0]),
        ("Hv1 = 0", state.Hv_hat[0]),
        ("E2 = eps*kappa*Hv3", state.E_hat[1] - e2),
        ("E3 = -eps*kappa*Hv2", state.E_hat[2] - e3),
    ]
    for label, err in checks:
        if abs(err) > EQ_TOL:
            raise InterfaceConstraintViolated(f"{label} violated by {err:.3e}")
    return state


def tangential_field_det(state: EquilibriumState) -> float:
    """Determinant H2*Hv3 - H3*Hv2 of the tangential field pair."""
    return state.H_hat[1] * state.Hv_hat[2] - state.H_hat[2] * state.Hv_hat[1]


def is_collinear(state: EquilibriumState) -> bool:
    """True when the tangential plasma and vacuum fields are collinear."""
    return abs(tangential_field_det(state)) <= EQ_TOL


def classify_case(state: EquilibriumState) -> CaseFlag:
    """Return the most specific configuration class the state belongs to."""
    v1, v2 = state.v_hat[0], state.v_hat[1]
    H2, H3 = state.H_hat[1], state.H_hat[2]
    Hv2, Hv3 = state.Hv_hat[1], state.Hv_hat[2]

    axial_flow = abs(v1) <= EQ_TOL and abs(v2) <= EQ_TOL
    if axial_flow and abs(H2) <= EQ_TOL and abs(Hv3) <= EQ_TOL \
            and abs(H3) > EQ_TOL and abs(Hv2) > EQ_TOL:
        return CaseFlag.ORTHOGONAL_FIELDS
    if axial_flow and abs(H2) <= EQ_TOL and abs(Hv2) <= EQ_TOL and abs(Hv3) > EQ_TOL:
        return CaseFlag.VACUUM_FIELD_ALONG_X3
    if axial_flow and abs(H2) <= EQ_TOL:
        return CaseFlag.FLOW_AND_FIELD_ALONG_X3
    if is_collinear(state):
        return CaseFlag.COLLINEAR
    return CaseFlag.GENERAL_NON_COLLINEAR


def state_from_dict(data: dict) -> EquilibriumState:
    """Build a validated state from a plain dict (the JSON input format).

    Keys: p, v, H, Hv, E, S, kappa, epsilon, rho, a.  ``rho`` and ``a``
    default to 1.  ``E`` may be a scalar (E1 only) or a list of up to three
    entries where missing/null tangential components are filled in from the
    compatibility relations.
    """
    if not isinstance(data, dict):
        raise ValidationError("state document must be a JSON object")
    unknown = set(data) - _JSON_KEYS
    if unknown:
        raise ValidationError(f"unknown state keys: {sorted(unknown)}")
    missing = _JSON_REQUIRED - set(data)
    if missing:
        raise ValidationError(f"missing state keys: {sorted(missing)}")

    def vec3(key):
        val = data[key]
        if not isinstance(val, (list, tuple)) or len(val) != 3:
            raise ValidationError(f"'{key}' must be a list of 3 numbers")
        try:
            return np.array([float(x) for x in val])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"'{key}' has a non-numeric entry") from exc

    v = vec3("v")
    H = vec3("H")
    Hv = vec3("Hv")
    kappa = float(data["kappa"])
    epsilon = float(data["epsilon"])

    raw_e = data["E"]
    if isinstance(raw_e, (int, float)):
        raw_e = [raw_e]
    if not isinstance(raw_e, (list, tuple)) or not 1 <= len(raw_e) <= 3:
        raise ValidationError("'E' must be a number or a list of 1 to 3 entries")
    e2_forced, e3_forced = forced_tangential_e(Hv, kappa, epsilon)
    padded = list(raw_e) + [None] * (3 - len(raw_e))
    if padded[0] is None:
        raise ValidationError("'E' must provide the normal component E1")
    E = np.array([
        float(padded[0]),
        e2_forced if padded[1] is None else float(padded[1]),
        e3_forced if padded[2] is None else float(padded[2]),
    ])

    state = EquilibriumState(
        p_hat=float(data["p"]),
        v_hat=v,
        H_hat=H,
        S_hat=float(data["S"]),
        Hv_hat=Hv,
        E_hat=E,
        kappa=kappa,
        epsilon=epsilon,
        rho_hat=float(data.get("rho", 1.0)),
        a_hat=float(data.get("a", 1.0)),
    )
    return validate_equilibrium(state)


def state_to_dict(state: EquilibriumState) -> dict:
    """Inverse of :func:`state_from_dict` (always emits full vectors)."""
    return {
        "p": state.p_hat,
        "v": list(state.v_hat),
        "H": list(state.H_hat),
        "Hv": list(state.Hv_hat),
        "E": list(state.E_hat),
        "S": state.S_hat,
        "kappa": state.kappa,
        "epsilon": state.epsilon,
        "rho": state.rho_hat,
        "a": state.a_hat,
    }


def load_state(path) -> EquilibriumState:
    """Read and validate a state JSON file."""
    with open(Path(path), encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
    return state_from_dict(data)


def make_interface_state(E1=0.0, Hv2=0.0, Hv3=0.0, H2=0.0, H3=1.0,
                         v2=0.0, v3=0.0, kappa=0.0, epsilon=1e-6,
                         p_hat=1.0, S_hat=0.0) -> EquilibriumState:
    """Convenience constructor: fills v1 = kappa and the forced E components.

    The default arguments give the orthogonal-fields configuration once a
    nonzero ``Hv2`` is supplied.
    """
    Hv = np.array([0.0, Hv2, Hv3])
    e2, e3 = forced_tangential_e(Hv, kappa, epsilon)
    state = EquilibriumState(
        p_hat=p_hat,
        v_hat=np.array([kappa, v2, v3]),
        H_hat=np.array([0.0, H2, H3]),
        S_hat=S_hat,
        Hv_hat=Hv,
        E_hat=np.array([E1, e2, e3]),
        kappa=kappa,
        epsilon=epsilon,
    )
    return validate_equilibrium(state)


def with_fields(state: EquilibriumState, **kwargs) -> EquilibriumState:
    """dataclasses.replace wrapper (returned state is NOT revalidated)."""
    return replace(state, **kwargs)
