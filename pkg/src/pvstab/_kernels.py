"""Root-finding kernels for the mode-determinant equations.

Two interchangeable backends compute the same thing: candidate frequencies
from a companion-matrix eigensolve of the radical-cleared polynomial, Newton
refinement on the unsquared determinant, and branch/residual filtering.  The
numba backend jit-compiles a scalar loop with early exit over the angle
grid; the numpy backend batches the eigensolves and the Newton iteration
over the whole grid.  Set PVSTAB_NO_NUMBA=1 to force the numpy backend.

Variant codes: 0 = general-angle determinant (D-form normal wavenumber
where sin(psi)*H3 != 0), 1 = two-dimensional orthogonal-fields determinant,
2 = two-dimensional collinear determinant with the vacuum field along x3.
All variants share the residual convention r = B*xi_p - A*xi_v.
"""

import os

import numpy as np

# Growth-rate threshold: roots with Re tau at or below this are neutral.
TAU_TOL = 1e-8
# Relative residual bound certifying a refined root.
R_TOL = 1e-9
# Strictness of the decaying-branch conditions Re xi < 0.
BRANCH_TOL = 1e-10
_NEWTON_MAX = 40
_DEDUPE_TOL = 1e-8

VARIANT_LD = 0
VARIANT_2D_ORTHOGONAL = 1
VARIANT_2D_COLLINEAR = 2

_FORCE_NUMPY = os.environ.get("PVSTAB_NO_NUMBA", "") not in ("", "0")

try:
    if _FORCE_NUMPY:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# shared scalar pieces (compiled when numba is active, plain Python otherwise)


@njit(cache=True, nogil=True, error_model="numpy")
def _residual_terms(tau, variant, e1, hv2, hv3, h3, eps, s, c):
    """Residual r = B*xi_p - A*xi_v, its tau-derivative, and the branches.

    Returns (r, dr, xi_p, xi_v, scale) where scale normalizes the residual.
    The D-form of xi_p applies only to the general-angle variant with
    sin(psi)*H3 != 0; everywhere else the K-form is the exact reduction.
    """
    u = eps * eps
    h3sq = h3 * h3
    nan = complex(np.nan, np.nan)
    xiv = -np.sqrt(1.0 + u * tau * tau)
    if xiv == 0j:
        return nan, nan, nan, nan, 1.0
    dxiv = u * tau / xiv
    if variant == 0 and s != 0.0 and h3sq != 0.0:
        d = (1.0 + h3sq) * tau * tau + h3sq * s * s
        if d == 0j:
            return nan, nan, nan, nan, 1.0
        t4 = tau * tau * tau * tau
        xip = -np.sqrt(1.0 + t4 / d)
        if xip == 0j:
            return nan, nan, nan, nan, 1.0
        dd = 2.0 * (1.0 + h3sq) * tau
        dxip = (4.0 * tau * tau * tau * d - t4 * dd) / (2.0 * d * d * xip)
    else:
        kk = 1.0 / (1.0 + h3sq)
        xip = -np.sqrt(1.0 + kk * tau * tau)
        if xip == 0j:
            return nan, nan, nan, nan, 1.0
        dxip = kk * tau / xip
    if variant == 2:
        cc = e1 + 1j * eps * hv3 * tau
        bb = cc * cc
        db = 2j * eps * hv3 * cc
        aa = tau * tau
        da = 2.0 * tau
    else:
        w2 = hv2 * hv2
        bb = e1 * e1 - w2 * (u * tau * tau + c * c) - 2j * eps * tau * e1 * hv2 * s
        db = -2.0 * w2 * u * tau - 2j * eps * e1 * hv2 * s
        aa = tau * tau + h3sq * s * s
        da = 2.0 * tau
    r = bb * xip - aa * xiv
    dr = db * xip + bb * dxip - da * xiv - aa * dxiv
    scale = max(1.0, abs(bb * xip) + abs(aa * xiv))
    return r, dr, xip, xiv, scale


@njit(cache=True, nogil=True, error_model="numpy")
def _poly_coeffs(variant, e1, hv2, hv3, h3, eps, s, c):
    """Descending coefficients of the radical-cleared polynomial, padded to 9.

    Squaring r = 0 once eliminates both square roots; the D-form variant is
    additionally multiplied by the xi_p denominator, giving degree 8; the
    K-form variants give degree 6.
    """
    u = eps * eps
    h3sq = h3 * h3
    out = np.zeros(9, dtype=np.complex128)
    if variant == 0 and s != 0.0 and h3sq != 0.0:
        a0 = h3sq * s * s
        d2 = 1.0 + h3sq
        d0 = h3sq * s * s
        # A^2 * (1 + u tau^2) * D
        t = np.zeros(9, dtype=np.complex128)
        t[0] = u
        t[2] = 1.0 + 2.0 * a0 * u
        t[4] = 2.0 * a0 + a0 * a0 * u
        t[6] = a0 * a0
        lhs = np.zeros(9, dtype=np.complex128)
        for i in range(0, 7, 2):
            lhs[i] += t[i] * d2
            lhs[i + 2] += t[i] * d0
        # B^2 * (D + tau^4)
        b2 = -hv2 * hv2 * u + 0j
        b1 = -2j * eps * e1 * hv2 * s
        b0 = e1 * e1 - hv2 * hv2 * c * c + 0j
        bsq = np.zeros(5, dtype=np.complex128)
        bsq[0] = b2 * b2
        bsq[1] = 2.0 * b2 * b1
        bsq[2] = 2.0 * b2 * b0 + b1 * b1
        bsq[3] = 2.0 * b1 * b0
        bsq[4] = b0 * b0
        rhs = np.zeros(9, dtype=np.complex128)
        for i in range(5):
            rhs[i] += bsq[i]  # * tau^4
            rhs[i + 2] += bsq[i] * d2
            rhs[i + 4] += bsq[i] * d0
        for i in range(9):
            out[i] = lhs[i] - rhs[i]
        return out
    kk = 1.0 / (1.0 + h3sq)
    if variant == 2:
        b2 = -eps * eps * hv3 * hv3 + 0j
        b1 = 2j * eps * e1 * hv3
        b0 = e1 * e1 + 0j
    else:
        b2 = -hv2 * hv2 * u + 0j
        b1 = -2j * eps * e1 * hv2 * s
        b0 = e1 * e1 - hv2 * hv2 * c * c + 0j
    a0 = h3sq * s * s if variant == 0 else 0.0
    # A^2 (1 + u tau^2) with A = tau^2 + a0
    lhs = np.zeros(7, dtype=np.complex128)
    lhs[0] = u
    lhs[2] = 1.0 + 2.0 * a0 * u
    lhs[4] = 2.0 * a0 + a0 * a0 * u
    lhs[6] = a0 * a0
    # B^2 (1 + K tau^2)
    bsq = np.zeros(5, dtype=np.complex128)
    bsq[0] = b2 * b2
    bsq[1] = 2.0 * b2 * b1
    bsq[2] = 2.0 * b2 * b0 + b1 * b1
    bsq[3] = 2.0 * b1 * b0
    bsq[4] = b0 * b0
    rhs = np.zeros(7, dtype=np.complex128)
    for i in range(5):
        rhs[i] += bsq[i] * kk
        rhs[i + 2] += bsq[i]
    for i in range(7):
        out[i + 2] = lhs[i] - rhs[i]
    return out


@njit(cache=True, nogil=True, error_model="numpy")
def _companion_roots(coeffs):
    """All roots of a descending-coefficient polynomial, companion eigvals."""
    n = coeffs.shape[0]
    top = 0.0
    for i in range(n):
        a = abs(coeffs[i])
        if a > top:
            top = a
    first = -1
    for i in range(n):
        if abs(coeffs[i]) > 1e-14 * top:
            first = i
            break
    deg = n - 1 - first
    if top == 0.0 or deg < 1:
        return np.zeros(0, dtype=np.complex128)
    comp = np.zeros((deg, deg), dtype=np.complex128)
    lead = coeffs[first]
    for j in range(deg):
        comp[0, j] = -coeffs[first + 1 + j] / lead
    for i in range(1, deg):
        comp[i, i - 1] = 1.0
    return np.linalg.eigvals(comp)


@njit(cache=True, nogil=True, error_model="numpy")
def _roots_at_psi(variant, e1, hv2, hv3, h3, eps, psi):
    """Certified growing-mode roots at one angle.

    Returns (taus, xips, xivs, ress, count): Newton-refined, branch- and
    residual-filtered, deduplicated, sorted by decreasing growth rate (ties
    by increasing imaginary part).  Arrays are fixed size 8; only the first
    ``count`` entries are meaningful.
    """
    s = np.sin(psi)
    c = np.cos(psi)
    if variant != 0:
        s = 0.0
        c = 1.0
    coeffs = _poly_coeffs(variant, e1, hv2, hv3, h3, eps, s, c)
    cand = _companion_roots(coeffs)
    taus = np.zeros(8, dtype=np.complex128)
    xips = np.zeros(8, dtype=np.complex128)
    xivs = np.zeros(8, dtype=np.complex128)
    ress = np.zeros(8, dtype=np.complex128)
    count = 0
    for k in range(cand.shape[0]):
        tau = cand[k]
        if not (np.isfinite(tau.real) and np.isfinite(tau.imag)):
            continue
        if tau.real <= 0.1 * TAU_TOL:
            continue
        ok = True
        r = 0.0 + 0j
        xip = 0.0 + 0j
        xiv = 0.0 + 0j
        scale = 1.0
        for _ in range(_NEWTON_MAX):
            r, dr, xip, xiv, scale = _residual_terms(
                tau, variant, e1, hv2, hv3, h3, eps, s, c)
            if not (np.isfinite(r.real) and np.isfinite(r.imag)):
                ok = False
                break
            if dr == 0.0:
                break
            step = r / dr
            tau = tau - step
            if abs(step) <= 1e-15 * max(1.0, abs(tau)):
                break
        if not ok:
            continue
        r, dr, xip, xiv, scale = _residual_terms(
            tau, variant, e1, hv2, hv3, h3, eps, s, c)
        if not (np.isfinite(r.real) and np.isfinite(r.imag)):
            continue
        if abs(r) >= R_TOL * scale:
            continue
        if tau.real <= TAU_TOL:
            continue
        if xip.real >= -BRANCH_TOL or xiv.real >= -BRANCH_TOL:
            continue
        taus[count] = tau
        xips[count] = xip
        xivs[count] = xiv
        ress[count] = r
        count += 1
    # sort by (Re tau desc, Im tau asc): insertion sort over <= 8 entries
    for i in range(1, count):
        ti, pi, vi, ri = taus[i], xips[i], xivs[i], ress[i]
        j = i - 1
        while j >= 0 and (taus[j].real < ti.real
                          or (taus[j].real == ti.real
                              and taus[j].imag > ti.imag)):
            taus[j + 1] = taus[j]
            xips[j + 1] = xips[j]
            xivs[j + 1] = xivs[j]
            ress[j + 1] = ress[j]
            j -= 1
        taus[j + 1] = ti
        xips[j + 1] = pi
        xivs[j + 1] = vi
        ress[j + 1] = ri
    # dedupe near-coincident refined roots, keeping the first in sort order
    kept = 0
    for i in range(count):
        dup = False
        for j in range(kept):
            if abs(taus[i] - taus[j]) <= _DEDUPE_TOL * max(1.0, abs(taus[i])):
                dup = True
                break
        if not dup:
            taus[kept] = taus[i]
            xips[kept] = xips[i]
            xivs[kept] = xivs[i]
            ress[kept] = ress[i]
            kept += 1
    return taus, xips, xivs, ress, kept


@njit(cache=True, nogil=True, error_model="numpy")
def _scan_psis_numba(variant, e1, hv2, hv3, h3, eps, psis):
    """Early-exit scan over the angle grid; first angle with a root wins.

    Returns (hit_index, tau, xi_p, xi_v, residual); hit_index is -1 when no
    angle produces a growing mode.
    """
    for i in range(psis.shape[0]):
        taus, xips, xivs, ress, n = _roots_at_psi(
            variant, e1, hv2, hv3, h3, eps, psis[i])
        if n > 0:
            return i, taus[0], xips[0], xivs[0], ress[0]
    return -1, 0j, 0j, 0j, 0j


# ---------------------------------------------------------------------------
# numpy backend: batched over the angle grid


def _residual_terms_batch(tau, variant, e1, hv2, hv3, h3, eps, s, c):
    """Vectorized twin of _residual_terms; tau, s, c are arrays."""
    u = eps * eps
    h3sq = h3 * h3
    xiv = -np.sqrt(1.0 + u * tau * tau)
    dxiv = u * tau / xiv
    dform = (variant == VARIANT_LD) & (s != 0.0) & (h3sq != 0.0)
    kk = 1.0 / (1.0 + h3sq)
    xip = -np.sqrt(1.0 + kk * tau * tau)
    dxip = kk * tau / xip
    if np.any(dform):
        d = (1.0 + h3sq) * tau * tau + h3sq * s * s
        t4 = tau ** 4
        with np.errstate(divide="ignore", invalid="ignore"):
            xip_d = -np.sqrt(1.0 + t4 / d)
            dxip_d = (4.0 * tau ** 3 * d - t4 * 2.0 * (1.0 + h3sq) * tau) / (
                2.0 * d * d * xip_d)
        xip = np.where(dform, xip_d, xip)
        dxip = np.where(dform, dxip_d, dxip)
    if variant == VARIANT_2D_COLLINEAR:
        cc = e1 + 1j * eps * hv3 * tau
        bb = cc * cc
        db = 2j * eps * hv3 * cc
        aa = tau * tau
        da = 2.0 * tau
    else:
        w2 = hv2 * hv2
        bb = e1 * e1 - w2 * (u * tau * tau + c * c) - 2j * eps * tau * e1 * hv2 * s
        db = -2.0 * w2 * u * tau - 2j * eps * e1 * hv2 * s
        aa = tau * tau + h3sq * s * s
        da = 2.0 * tau
    r = bb * xip - aa * xiv
    dr = db * xip + bb * dxip - da * xiv - aa * dxiv
    scale = np.maximum(1.0, np.abs(bb * xip) + np.abs(aa * xiv))
    return r, dr, xip, xiv, scale


def _candidates_batch(variant, e1, hv2, hv3, h3, eps, psis):
    """Companion roots for every angle; returns (tau, s, c, order) arrays.

    ``order`` carries each candidate's position in the angle grid so that
    selection rules can respect the scan order.
    """
    n = len(psis)
    s = np.sin(psis)
    c = np.cos(psis)
    if variant != VARIANT_LD:
        s = np.zeros(n)
        c = np.ones(n)
    coeff_rows = np.array([
        _poly_coeffs(variant, e1, hv2, hv3, h3, eps, s[i], c[i])
        for i in range(n)
    ])
    tau_list, s_list, c_list, order_list = [], [], [], []
    degs = np.zeros(n, dtype=int)
    top = np.max(np.abs(coeff_rows), axis=1)
    for i in range(n):
        nz = np.nonzero(np.abs(coeff_rows[i]) > 1e-14 * max(top[i], 1e-300))[0]
        degs[i] = 8 - nz[0] if len(nz) else 0
    for deg in np.unique(degs):
        if deg < 1:
            continue
        idx = np.nonzero(degs == deg)[0]
        comp = np.zeros((len(idx), deg, deg), dtype=np.complex128)
        rows = coeff_rows[idx, 8 - deg:]
        comp[:, 0, :] = -rows[:, 1:] / rows[:, :1]
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
        roots = np.linalg.eigvals(comp)
        tau_list.append(roots.ravel())
        s_list.append(np.repeat(s[idx], deg))
        c_list.append(np.repeat(c[idx], deg))
        order_list.append(np.repeat(idx, deg))
    if not tau_list:
        return (np.zeros(0, dtype=np.complex128), np.zeros(0), np.zeros(0),
                np.zeros(0, dtype=int))
    return (np.concatenate(tau_list), np.concatenate(s_list),
            np.concatenate(c_list), np.concatenate(order_list))


def _refined_valid_batch(variant, e1, hv2, hv3, h3, eps, psis):
    """Newton-refine and filter every candidate of every angle at once.

    Returns (order, tau, xip, xiv, res) arrays of the surviving roots.
    """
    tau, s, c, order = _candidates_batch(variant, e1, hv2, hv3, h3, eps, psis)
    if len(tau) == 0:
        return order, tau, tau, tau, tau
    live = np.isfinite(tau) & (tau.real > 0.1 * TAU_TOL)
    tau = tau[live]
    s, c, order = s[live], c[live], order[live]
    for _ in range(_NEWTON_MAX):
        if len(tau) == 0:
            break
        with np.errstate(divide="ignore", invalid="ignore"):
            r, dr, _, _, _ = _residual_terms_batch(
                tau, variant, e1, hv2, hv3, h3, eps, s, c)
            step = np.where(dr != 0.0, r / dr, 0.0)
        step = np.where(np.isfinite(step), step, 0.0)
        tau = tau - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(tau))):
            break
    with np.errstate(divide="ignore", invalid="ignore"):
        r, _, xip, xiv, scale = _residual_terms_batch(
            tau, variant, e1, hv2, hv3, h3, eps, s, c)
    good = (np.isfinite(tau) & np.isfinite(r)
            & (np.abs(r) < R_TOL * scale)
            & (tau.real > TAU_TOL)
            & (xip.real < -BRANCH_TOL) & (xiv.real < -BRANCH_TOL))
    return order[good], tau[good], xip[good], xiv[good], r[good]


def _sorted_unique(tau, xip, xiv, res):
    """Apply the within-angle ordering and dedupe rules; cap at 8 roots."""
    key = np.lexsort((tau.imag, -tau.real))
    tau, xip, xiv, res = tau[key], xip[key], xiv[key], res[key]
    keep = []
    for i in range(len(tau)):
        if all(abs(tau[i] - tau[j]) > _DEDUPE_TOL * max(1.0, abs(tau[i]))
               for j in keep):
            keep.append(i)
        if len(keep) == 8:
            break
    keep = np.array(keep, dtype=int)
    return tau[keep], xip[keep], xiv[keep], res[keep]


def _roots_at_psi_numpy(variant, e1, hv2, hv3, h3, eps, psi):
    order, tau, xip, xiv, res = _refined_valid_batch(
        variant, e1, hv2, hv3, h3, eps, np.array([psi]))
    tau, xip, xiv, res = _sorted_unique(tau, xip, xiv, res)
    out_t = np.zeros(8, dtype=np.complex128)
    out_p = np.zeros(8, dtype=np.complex128)
    out_v = np.zeros(8, dtype=np.complex128)
    out_r = np.zeros(8, dtype=np.complex128)
    n = len(tau)
    out_t[:n], out_p[:n], out_v[:n], out_r[:n] = tau, xip, xiv, res
    return out_t, out_p, out_v, out_r, n


def _scan_psis_numpy(variant, e1, hv2, hv3, h3, eps, psis):
    order, tau, xip, xiv, res = _refined_valid_batch(
        variant, e1, hv2, hv3, h3, eps, np.asarray(psis))
    if len(tau) == 0:
        return -1, 0j, 0j, 0j, 0j
    first = np.min(order)
    at = order == first
    tau, xip, xiv, res = _sorted_unique(tau[at], xip[at], xiv[at], res[at])
    return int(first), tau[0], xip[0], xiv[0], res[0]


def roots_at_psi(variant, e1, hv2, hv3, h3, eps, psi):
    """Backend-dispatched: certified roots at one angle (arrays + count)."""
    if HAVE_NUMBA:
        return _roots_at_psi(variant, e1, hv2, hv3, h3, eps, psi)
    return _roots_at_psi_numpy(variant, e1, hv2, hv3, h3, eps, psi)


def scan_psis(variant, e1, hv2, hv3, h3, eps, psis):
    """Backend-dispatched: first angle of the grid with a growing mode."""
    psis = np.ascontiguousarray(psis, dtype=np.float64)
    if HAVE_NUMBA:
        return _scan_psis_numba(variant, e1, hv2, hv3, h3, eps, psis)
    return _scan_psis_numpy(variant, e1, hv2, hv3, h3, eps, psis)
