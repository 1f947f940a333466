"""Parameter-plane stability maps.

Sweeps the (E1, Hv2) plane at fixed H3 and epsilon, classifying every grid
point with the normal-mode search backed by the energy-form sufficient
condition, then labels the four canonical regions:

1. unstable by the closed-form criterion E1^2 > Hv2^2;
2. no growing mode found, outside region 3;
3. sufficiently stable by the closed-form static bound on E1^2;
4. growing mode found numerically, outside region 1.

Regions 1 and 3 are analytic statements, so ``label_regions`` enforces
that the numerical verdicts agree with them and refuses to produce a grid
where they do not.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .energy import static_threshold
from .errors import ConsistencyViolation, ValidationError
from .spectral import (
    ModeRoot,
    Verdict,
    VerdictKind,
    build_psi_grid,
    classify_point,
)
from .state import make_interface_state

__all__ = [
    "REGION_NAMES",
    "ScanSpec",
    "RegionGrid",
    "scan_plane",
    "label_regions",
    "export_grid",
    "parse_grid",
]

SCHEMA = "pv-scan/1"

REGION_NAMES = {
    1: "unstable (closed form)",
    2: "stable (scan)",
    3: "stable (energy bound)",
    4: "unstable (scan)",
}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class ScanSpec:
    """One stability-map request: plane extent, resolution, and physics
    parameters held fixed across the plane."""

    H3: float
    epsilon: float = 1e-6
    e1_range: tuple = (0.0, 2.0)
    h2_range: tuple = (0.0, 2.0)
    e1_points: int = 100
    h2_points: int = 100
    psi_step: float = 1e-2

    def __post_init__(self):
        if not (math.isfinite(self.H3) and self.H3 > 0.0):
            raise ValidationError("H3 must be finite and positive")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValidationError("epsilon must be finite and positive")
        for name, rng in (("e1_range", self.e1_range),
                          ("h2_range", self.h2_range)):
            lo, hi = float(rng[0]), float(rng[1])
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ValidationError(f"{name} must be a finite interval")
            object.__setattr__(self, name, (lo, hi))
        for name, n in (("e1_points", self.e1_points),
                        ("h2_points", self.h2_points)):
            if int(n) != n or n < 2:
                raise ValidationError(f"{name} must be an integer >= 2")
            object.__setattr__(self, name, int(n))
        if not (math.isfinite(self.psi_step) and self.psi_step > 0.0):
            raise ValidationError("psi_step must be finite and positive")

    def e1_values(self) -> np.ndarray:
        return np.linspace(self.e1_range[0], self.e1_range[1], self.e1_points)

    def h2_values(self) -> np.ndarray:
        return np.linspace(self.h2_range[0], self.h2_range[1], self.h2_points)

    def to_dict(self) -> dict:
        return {
            "H3": self.H3,
            "epsilon": self.epsilon,
            "e1_range": list(self.e1_range),
            "h2_range": list(self.h2_range),
            "e1_points": self.e1_points,
            "h2_points": self.h2_points,
            "psi_step": self.psi_step,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScanSpec":
        return cls(H3=data["H3"], epsilon=data["epsilon"],
                   e1_range=tuple(data["e1_range"]),
                   h2_range=tuple(data["h2_range"]),
                   e1_points=data["e1_points"], h2_points=data["h2_points"],
                   psi_step=data["psi_step"])


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """A classified (and optionally labeled) plane.

    ``verdicts`` is an object raster of Verdict, ``growth`` the matching
    raster of largest certified growth rates (0 where no growing mode),
    both indexed ``[h2_index, e1_index]``.  ``labels`` is None until
    ``label_regions`` runs.
    """

    spec: ScanSpec
    verdicts: np.ndarray
    growth: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        shape = (self.spec.h2_points, self.spec.e1_points)
        if self.verdicts.shape != shape or self.growth.shape != shape:
            raise ValidationError("raster shape does not match the spec")
        if self.labels is not None and self.labels.shape != shape:
            raise ValidationError("label raster shape does not match the spec")

    def __eq__(self, other):
        if not isinstance(other, RegionGrid):
            return NotImplemented
        if self.spec != other.spec:
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        if self.labels is not None and not np.array_equal(self.labels,
                                                          other.labels):
            return False
        return (np.array_equal(self.growth, other.growth)
                and bool((self.verdicts == other.verdicts).all()))


def _grid_state(e1, h2, spec):
    return make_interface_state(E1=float(e1), Hv2=float(h2), H3=spec.H3,
                                epsilon=spec.epsilon)


def scan_plane(spec: ScanSpec, threads: int | None = None) -> RegionGrid:
    """Classify every point of the plane; deterministic given the spec.

    Points are independent and classified concurrently; results are placed
    by grid index, so thread scheduling cannot change the outcome.
    """
    if threads is not None and threads < 1:
        raise ValidationError("threads must be a positive integer")
    e1s, h2s = spec.e1_values(), spec.h2_values()
    psis = build_psi_grid(spec.psi_step)
    ne1 = spec.e1_points

    def classify(index):
        i, j = divmod(index, ne1)
        return classify_point(_grid_state(e1s[j], h2s[i], spec), psis)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        flat = list(pool.map(classify, range(spec.h2_points * ne1)))

    verdicts = np.empty((spec.h2_points, ne1), dtype=object)
    growth = np.zeros((spec.h2_points, ne1))
    for index, verdict in enumerate(flat):
        i, j = divmod(index, ne1)
        verdicts[i, j] = verdict
        if verdict.kind is VerdictKind.UNSTABLE:
            growth[i, j] = verdict.root.growth_rate
    return RegionGrid(spec=spec, verdicts=verdicts, growth=growth)


def label_regions(grid: RegionGrid) -> RegionGrid:
    """Attach region ids 1-4 and cross-check them against the verdicts.

    A point inside the closed-form instability region that the scan did
    not flag unstable (or a point under the closed-form stability bound
    that it did) indicates a solver or tolerance bug, so the mismatch is
    raised rather than relabeled.
    """
    spec = grid.spec
    e1sq = spec.e1_values() ** 2
    h2s = spec.h2_values()
    thresholds = np.array([static_threshold(h2, spec.H3) for h2 in h2s])
    closed_form_unstable = e1sq[None, :] > (h2s ** 2)[:, None]
    closed_form_stable = e1sq[None, :] < thresholds[:, None]
    unstable = np.vectorize(
        lambda v: v.kind is VerdictKind.UNSTABLE)(grid.verdicts)

    bad_1 = closed_form_unstable & ~unstable
    if bad_1.any():
        i, j = np.argwhere(bad_1)[0]
        raise ConsistencyViolation(
            f"point (E1={spec.e1_values()[j]!r}, H2={h2s[i]!r}) satisfies "
            "the closed-form instability criterion but the scan found no "
            "growing mode")
    bad_3 = closed_form_stable & unstable
    if bad_3.any():
        i, j = np.argwhere(bad_3)[0]
        raise ConsistencyViolation(
            f"point (E1={spec.e1_values()[j]!r}, H2={h2s[i]!r}) satisfies "
            "the closed-form stability bound but the scan found a growing "
            "mode")

    labels = np.where(closed_form_unstable, 1,
                      np.where(closed_form_stable, 3,
                               np.where(unstable, 4, 2))).astype(np.int8)
    return RegionGrid(spec=spec, verdicts=grid.verdicts, growth=grid.growth,
                      labels=labels)


def _require_labeled(grid: RegionGrid):
    if grid.labels is None:
        raise ValidationError("grid is not labeled; run label_regions first")


def _iter_points(grid: RegionGrid):
    e1s, h2s = grid.spec.e1_values(), grid.spec.h2_values()
    for i in range(grid.spec.h2_points):
        for j in range(grid.spec.e1_points):
            yield e1s[j], h2s[i], grid.verdicts[i, j], int(
                grid.labels[i, j]), float(grid.growth[i, j])


def _export_csv(grid: RegionGrid) -> str:
    lines = ["E1,H2,verdict,label,max_growth_rate"]
    for e1, h2, verdict, label, rate in _iter_points(grid):
        lines.append(f"{_fmt(e1)},{_fmt(h2)},{verdict.kind.value},"
                     f"{label},{_fmt(rate)}")
    return "\n".join(lines) + "\n"


def _root_to_jsonable(root: ModeRoot | None):
    if root is None:
        return None
    return {
        "tau": [root.tau.real, root.tau.imag],
        "xi_p": [root.xi_p.real, root.xi_p.imag],
        "xi_v": [root.xi_v.real, root.xi_v.imag],
        "residual": [root.residual.real, root.residual.imag],
    }


def _root_from_jsonable(data) -> ModeRoot | None:
    if data is None:
        return None
    return ModeRoot(tau=complex(*data["tau"]), xi_p=complex(*data["xi_p"]),
                    xi_v=complex(*data["xi_v"]),
                    residual=complex(*data["residual"]),
                    valid=(True, True, True))


def _export_json(grid: RegionGrid) -> str:
    points = [
        {
            "e1": e1,
            "h2": h2,
            "verdict": verdict.kind.value,
            "label": label,
            "max_growth_rate": rate,
            "psi": verdict.psi,
            "root": _root_to_jsonable(verdict.root),
        }
        for e1, h2, verdict, label, rate in _iter_points(grid)
    ]
    return json.dumps({
        "schema": SCHEMA,
        "spec": grid.spec.to_dict(),
        "e1_values": grid.spec.e1_values().tolist(),
        "h2_values": grid.spec.h2_values().tolist(),
        "points": points,
    })


def _export_plotscript(grid: RegionGrid) -> str:
    spec = grid.spec
    e1s, h2s = spec.e1_values(), spec.h2_values()
    rows = [" ".join([str(spec.e1_points)] + [_fmt(x) for x in e1s])]
    for i in range(spec.h2_points):
        rows.append(" ".join([_fmt(h2s[i])]
                             + [str(int(v)) for v in grid.labels[i]]))
    tics = ", ".join(f'"{k} {REGION_NAMES[k]}" {k}' for k in (1, 2, 3, 4))
    return "\n".join([
        f"# {SCHEMA} region map",
        f"# config: {json.dumps(spec.to_dict())}",
        f'set title "plasma-vacuum interface stability, H3 = {_fmt(spec.H3)}"',
        'set xlabel "E1"',
        'set ylabel "H2"',
        f"set xrange [{_fmt(spec.e1_range[0])}:{_fmt(spec.e1_range[1])}]",
        f"set yrange [{_fmt(spec.h2_range[0])}:{_fmt(spec.h2_range[1])}]",
        "set cbrange [0.5:4.5]",
        "set palette maxcolors 4",
        'set palette defined (1 "#b2182b", 2 "#d1e5f0", 3 "#2166ac", '
        '4 "#f4a582")',
        f"set cbtics ({tics})",
        "$labels << EOD",
        *rows,
        "EOD",
        "plot $labels matrix nonuniform with image notitle",
        "",
    ])


def export_grid(grid: RegionGrid, format: str) -> str:
    """Serialize a labeled grid as csv, json, or a gnuplot script."""
    _require_labeled(grid)
    if format == "csv":
        return _export_csv(grid)
    if format == "json":
        return _export_json(grid)
    if format == "plotscript":
        return _export_plotscript(grid)
    raise ValidationError(f"unknown export format {format!r}")


def parse_grid(text: str) -> RegionGrid:
    """Rebuild a RegionGrid from its json export (exact round trip)."""
    data = json.loads(text)
    if data.get("schema") != SCHEMA:
        raise ValidationError(f"unsupported schema {data.get('schema')!r}")
    spec = ScanSpec.from_dict(data["spec"])
    shape = (spec.h2_points, spec.e1_points)
    verdicts = np.empty(shape, dtype=object)
    growth = np.zeros(shape)
    labels = np.zeros(shape, dtype=np.int8)
    if len(data["points"]) != shape[0] * shape[1]:
        raise ValidationError("point list does not match the grid shape")
    for index, point in enumerate(data["points"]):
        i, j = divmod(index, spec.e1_points)
        verdicts[i, j] = Verdict(kind=VerdictKind(point["verdict"]),
                                 root=_root_from_jsonable(point["root"]),
                                 psi=point["psi"])
        growth[i, j] = point["max_growth_rate"]
        labels[i, j] = point["label"]
    return RegionGrid(spec=spec, verdicts=verdicts, growth=growth,
                      labels=labels)
