"""System matrices for the interface problem.

Plasma side: the compressible-MHD equations in symmetric form
``A0(U) dt U + sum_j A_j(U) dj U = 0`` over U = (p, v1, v2, v3, H1, H2, H3, S).

Vacuum side: the full Maxwell system ``eps dt Hv + curl E = 0``,
``eps dt E - curl Hv = 0`` written as ``eps dt V + sum_j B_j dj V = 0`` over
V = (Hv1, Hv2, Hv3, E1, E2, E3).  The B_j are derived from the physical curl
operators, so the symbol identity  sum_j B_j k_j (Hv, E) = (k x E, -k x Hv)
holds by construction.

A secondary symmetrization mixes the Maxwell rows with multiples nu of the
divergence constraints; it stays positive definite for |nu| < 1 and is what
the energy machinery uses on the vacuum side.

The hatted matrices are the constant-coefficient interface versions obtained
from the planar change of variables that straightens a front moving with
speed kappa: A1_hat = A1 - kappa*A0 and B1_hat = eps*kappa*I - B1 (tangential
matrices are untouched).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HyperbolicityViolated
from .state import EquilibriumState

__all__ = [
    "PlasmaMatrices",
    "VacuumMatrices",
    "SecondaryMatrices",
    "BoundaryMatrix",
    "PlaneWave",
    "build_plasma_matrices",
    "build_vacuum_matrices",
    "build_secondary_symmetrizer",
    "build_boundary_matrix",
    "plane_wave_residual",
    "vacuum_b_blocks",
    "secondary_b0",
    "secondary_bj",
]


def _cross_matrix(w):
    """3x3 matrix of the map x -> w cross x."""
    w1, w2, w3 = w
    return np.array([
        [0.0, -w3, w2],
        [w3, 0.0, -w1],
        [-w2, w1, 0.0],
    ])


def vacuum_b_blocks():
    """The three 3x3 blocks b_j with sum_j b_j dj E = curl E.

    b_j is the cross-product matrix of the j-th coordinate unit vector:
    curl E = sum_j e_j x dj E, and e_j x u = (e_j_cross) u.
    """
    return tuple(_cross_matrix(np.eye(3)[j]) for j in range(3))


_B_BLOCKS = vacuum_b_blocks()


def _vacuum_bj(j):
    """Full 6x6 vacuum matrix B_j = [[0, b_j], [b_j^T, 0]]."""
    b = _B_BLOCKS[j]
    out = np.zeros((6, 6))
    out[:3, 3:] = b
    out[3:, :3] = b.T
    return out


def plasma_a0(rho, a):
    return np.diag([1.0 / (rho * a * a), rho, rho, rho, 1.0, 1.0, 1.0, 1.0])


def plasma_aj(j, rho, a, v, H):
    """General symmetric coefficient matrix A_j of the MHD system, j in {0,1,2}."""
    A = np.zeros((8, 8))
    vj = v[j]
    # transport part
    A[0, 0] = vj / (rho * a * a)
    for i in (1, 2, 3):
        A[i, i] = rho * vj
    for i in (4, 5, 6, 7):
        A[i, i] = vj
    # pressure-velocity coupling
    A[0, 1 + j] = A[1 + j, 0] = 1.0
    # magnetic coupling rows: v_i pairs with H_k as H_k for i == j-row and -H_j else
    for i in range(3):
        for k in range(3):
            if k == j:
                continue
            # contribution H_k * (delta_{i j} ... ) from the induction/Lorentz terms
            if i == j:
                A[1 + i, 4 + k] += H[k]
                A[4 + k, 1 + i] += H[k]
            elif i == k:
                A[1 + i, 4 + k] += -H[j]
                A[4 + k, 1 + i] += -H[j]
    return A


@dataclass(frozen=True)
class PlasmaMatrices:
    """A0..A3 at the background state plus the interface versions A1..3_hat."""

    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    A1_hat: np.ndarray
    A2_hat: np.ndarray
    A3_hat: np.ndarray


@dataclass(frozen=True)
class VacuumMatrices:
    """Maxwell coefficient matrices B1..B3 and the interface version B1_hat."""

    B1: np.ndarray
    B2: np.ndarray
    B3: np.ndarray
    B1_hat: np.ndarray


@dataclass(frozen=True)
class SecondaryMatrices:
    """Secondary vacuum symmetrization SB0..SB3 at mixing vector nu."""

    nu: np.ndarray
    SB0: np.ndarray
    SB1: np.ndarray
    SB2: np.ndarray
    SB3: np.ndarray


@dataclass(frozen=True)
class BoundaryMatrix:
    """Vacuum boundary matrix at interface slopes (dt_phi, d2_phi, d3_phi).

    ``eigenvalues`` holds the closed form
    (e + s, e + s, e, e, e - s, e - s) with e = epsilon*dt_phi and
    s = sqrt(1 + d2_phi**2 + d3_phi**2); the numerically computed spectrum is
    validated against it in the test suite rather than trusted raw.
    """

    dt_phi: float
    d2_phi: float
    d3_phi: float
    epsilon: float
    Bfrak: np.ndarray
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class PlaneWave:
    """Complex plane wave (Hv, E) ~ (Hbar, Ebar) exp(i(k.x - omega t))."""

    omega: float
    k: np.ndarray
    Hbar: np.ndarray
    Ebar: np.ndarray


def build_plasma_matrices(state: EquilibriumState) -> PlasmaMatrices:
    """Assemble A0..A3 at the state and the interface matrices A_j_hat."""
    rho, a = state.rho_hat, state.a_hat
    v, H = state.v_hat, state.H_hat
    A0 = plasma_a0(rho, a)
    A1, A2, A3 = (plasma_aj(j, rho, a, v, H) for j in range(3))
    return PlasmaMatrices(
        A0=A0, A1=A1, A2=A2, A3=A3,
        A1_hat=A1 - state.kappa * A0,
        A2_hat=A2.copy(),
        A3_hat=A3.copy(),
    )


def build_vacuum_matrices(state: EquilibriumState) -> VacuumMatrices:
    """Assemble B1..B3 and B1_hat = eps*kappa*I - B1."""
    B1, B2, B3 = (_vacuum_bj(j) for j in range(3))
    return VacuumMatrices(
        B1=B1, B2=B2, B3=B3,
        B1_hat=state.epsilon * state.kappa * np.eye(6) - B1,
    )


def secondary_b0(nu):
    """SB0(nu) = [[I, -nu_cross], [nu_cross, I]]; no admissibility check."""
    nu = np.asarray(nu, dtype=float)
    ncross = _cross_matrix(nu)
    out = np.eye(6)
    out[:3, 3:] = -ncross
    out[3:, :3] = ncross
    return out


def secondary_bj(j, nu):
    """SB_j(nu) with diagonal blocks N_j = nu e_j^T + e_j nu^T - nu_j I."""
    nu = np.asarray(nu, dtype=float)
    ej = np.eye(3)[j]
    N = np.outer(nu, ej) + np.outer(ej, nu) - nu[j] * np.eye(3)
    b = _B_BLOCKS[j]
    out = np.zeros((6, 6))
    out[:3, :3] = N
    out[3:, 3:] = N
    out[:3, 3:] = b
    out[3:, :3] = b.T
    return out


def build_secondary_symmetrizer(nu) -> SecondaryMatrices:
    """Secondary symmetrization matrices; requires |nu| < 1 for positivity."""
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (3,):
        raise ValueError(f"nu must be a 3-vector, got shape {nu.shape}")
    if np.linalg.norm(nu) >= 1.0:
        raise HyperbolicityViolated(
            f"secondary symmetrization needs |nu| < 1, got |nu| = {np.linalg.norm(nu)}"
        )
    return SecondaryMatrices(
        nu=nu,
        SB0=secondary_b0(nu),
        SB1=secondary_bj(0, nu),
        SB2=secondary_bj(1, nu),
        SB3=secondary_bj(2, nu),
    )


def build_boundary_matrix(dt_phi, d2_phi, d3_phi, epsilon) -> BoundaryMatrix:
    """Vacuum boundary matrix for a front with the given slopes.

    Equal to eps*dt_phi*I - B1 + d2_phi*B2 + d3_phi*B3; its spectrum has the
    closed form recorded in :class:`BoundaryMatrix`.
    """
    B1, B2, B3 = (_vacuum_bj(j) for j in range(3))
    bfrak = epsilon * dt_phi * np.eye(6) - B1 + d2_phi * B2 + d3_phi * B3
    e = epsilon * dt_phi
    s = np.sqrt(1.0 + d2_phi ** 2 + d3_phi ** 2)
    eigs = np.array([e + s, e + s, e, e, e - s, e - s])
    return BoundaryMatrix(
        dt_phi=float(dt_phi), d2_phi=float(d2_phi), d3_phi=float(d3_phi),
        epsilon=float(epsilon), Bfrak=bfrak, eigenvalues=eigs,
    )


def plane_wave_residual(wave: PlaneWave, nu, epsilon) -> float:
    """Norm of the secondary-system symbol applied to a plane-wave amplitude.

    Evaluates ||(-i*eps*omega*SB0 + i*sum_j k_j SB_j)(Hbar, Ebar)||_2; zero
    exactly when the wave solves the Maxwell system and carries no divergence,
    for every admissible nu.
    """
    mats = build_secondary_symmetrizer(nu)
    k = np.asarray(wave.k, dtype=float)
    symbol = -1j * epsilon * wave.omega * mats.SB0 + 1j * (
        k[0] * mats.SB1 + k[1] * mats.SB2 + k[2] * mats.SB3
    )
    amp = np.concatenate([
        np.asarray(wave.Hbar, dtype=complex),
        np.asarray(wave.Ebar, dtype=complex),
    ])
    return float(np.linalg.norm(symbol @ amp))
