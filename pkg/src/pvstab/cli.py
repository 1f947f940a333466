"""Command-line front end.

Four subcommands tie the package together for batch use:

* ``check-stability`` -- the energy-form sufficient condition for a state;
* ``roots`` -- growing normal modes, at one angle or over the angle grid;
* ``scan`` -- an (E1, Hv2) stability map written as csv/json/plotscript;
* ``dump-matrices`` -- the structural coefficient matrices of a state.

Exit codes: 0 success, 1 when the physics verdict is inapplicable or the
state lies outside the implemented determinant variants, 2 on invalid
input.  Artifacts are written atomically (temp file + rename) and every
numeric value is printed with 17 significant digits so binary64 values
round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .energy import StabilityVerdict, check_sufficient_stability
from .errors import UnsupportedCase, ValidationError
from .matrices import (
    build_boundary_matrix,
    build_plasma_matrices,
    build_secondary_symmetrizer,
    build_vacuum_matrices,
)
from .scan import (
    SCHEMA,
    ScanSpec,
    _root_to_jsonable,
    export_grid,
    label_regions,
    scan_plane,
)
from .spectral import (
    ModeProblem,
    VerdictKind,
    build_psi_grid,
    classify_point,
    find_unstable_roots,
)
from .state import load_state, state_from_dict, state_to_dict

THREADS_ENV = "PV_STAB_THREADS"

_STATE_SCHEMA = (
    "state JSON schema: "
    '{"p": num, "v": [3 nums], "H": [3 nums], "Hv": [3 nums], '
    '"E": num or [up to 3], "S": num, "kappa": num, "epsilon": num, '
    '"rho": num?, "a": num?}; omitted tangential E components are filled '
    "from the interface compatibility relations"
)

_SCAN_DEFAULTS = {
    "H3": None,
    "epsilon": 1e-6,
    "grid": (100, 100),
    "e1_range": (0.0, 2.0),
    "h2_range": (0.0, 2.0),
    "psi_step": 1e-2,
    "format": "csv",
    "threads": None,
}


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _parse_grid_size(value):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return int(value[0]), int(value[1])
    parts = str(value).lower().split("x")
    if len(parts) != 2:
        raise ValidationError(f"grid must look like 100x100, got {value!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise ValidationError(f"grid must look like 100x100, got {value!r}") from exc


def _parse_interval(value, name):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return float(value[0]), float(value[1])
    parts = str(value).split(":")
    if len(parts) != 2:
        raise ValidationError(f"{name} must look like LO:HI, got {value!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ValidationError(f"{name} must look like LO:HI, got {value!r}") from exc


def _parse_vec3(value, name):
    parts = str(value).split(",")
    if len(parts) != 3:
        raise ValidationError(f"{name} must be three comma-separated numbers")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ValidationError(f"{name} must be three comma-separated numbers") from exc


def _load_config_file(path, allowed):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    unknown = set(data) - allowed
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return data


def _resolve(cli_value, config, key, default):
    """CLI flag > config file > built-in default."""
    if cli_value is not None:
        return cli_value
    if config is not None and key in config:
        return config[key]
    return default


def _read_state(args):
    if args.inline is not None:
        try:
            data = json.loads(args.inline)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid inline state JSON: {exc}") from exc
        return state_from_dict(data)
    return load_state(args.input)


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".pvstab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, payload, human_lines):
    text = json.dumps(payload) if args.json else "\n".join(human_lines)
    print(text)
    if getattr(args, "out", None):
        _write_atomic(args.out, json.dumps(payload) + "\n")


def _matrix(arr):
    return np.asarray(arr).tolist()


def _cmd_check_stability(args):
    state = _read_state(args)
    result = check_sufficient_stability(state)
    payload = {
        "command": "check-stability",
        "config": {},
        "state": state_to_dict(state),
        "verdict": result.verdict.value,
        "witness": result.witness,
        "min_eig": result.min_eig,
        "inequalities": (None if result.inequalities is None
                         else list(result.inequalities)),
    }
    lines = [f"verdict: {result.verdict.value}", f"witness: {result.witness}"]
    if result.min_eig is not None:
        lines.append(f"min_eig: {_fmt(result.min_eig)}")
    if result.inequalities is not None:
        lines.append("margins: " + " ".join(_fmt(m)
                                            for m in result.inequalities))
    _emit(args, payload, lines)
    return 1 if result.verdict is StabilityVerdict.INAPPLICABLE else 0


def _root_lines(roots):
    if not roots:
        return ["no growing modes"]
    return [
        f"tau = {_fmt(r.tau.real)} + {_fmt(r.tau.imag)}i   "
        f"xi_p = {_fmt(r.xi_p.real)} + {_fmt(r.xi_p.imag)}i   "
        f"xi_v = {_fmt(r.xi_v.real)} + {_fmt(r.xi_v.imag)}i"
        for r in roots
    ]


def _cmd_roots(args):
    config = (_load_config_file(args.config, {"psi_step"})
              if args.config else None)
    psi_step = float(_resolve(args.psi_step, config, "psi_step", 1e-2))
    state = _read_state(args)
    if args.psi is not None:
        roots = find_unstable_roots(ModeProblem(state, psi=args.psi))
        payload = {
            "command": "roots",
            "config": {"psi": args.psi},
            "state": state_to_dict(state),
            "roots": [_root_to_jsonable(r) for r in roots],
        }
        _emit(args, payload, [f"psi = {_fmt(args.psi)}"] + _root_lines(roots))
        return 0
    verdict = classify_point(state, build_psi_grid(psi_step))
    payload = {
        "command": "roots",
        "config": {"psi_step": psi_step},
        "state": state_to_dict(state),
        "verdict": verdict.kind.value,
        "psi": verdict.psi,
        "root": _root_to_jsonable(verdict.root),
    }
    lines = [f"verdict: {verdict.kind.value}"]
    if verdict.kind is VerdictKind.UNSTABLE:
        lines.append(f"psi = {_fmt(verdict.psi)}")
        lines.extend(_root_lines([verdict.root]))
    _emit(args, payload, lines)
    return 0


def _cmd_scan(args):
    keys = set(_SCAN_DEFAULTS)
    config = _load_config_file(args.config, keys) if args.config else None

    def pick(key):
        return _resolve(getattr(args, key), config, key, _SCAN_DEFAULTS[key])

    h3 = pick("H3")
    if h3 is None:
        raise ValidationError("H3 is required (--H3 flag or config file)")
    e1_points, h2_points = _parse_grid_size(pick("grid"))
    fmt = pick("format")
    threads = pick("threads")
    if threads is None and os.environ.get(THREADS_ENV):
        try:
            threads = int(os.environ[THREADS_ENV])
        except ValueError as exc:
            raise ValidationError(
                f"{THREADS_ENV} must be an integer") from exc
    spec = ScanSpec(
        H3=float(h3),
        epsilon=float(pick("epsilon")),
        e1_range=_parse_interval(pick("e1_range"), "e1_range"),
        h2_range=_parse_interval(pick("h2_range"), "h2_range"),
        e1_points=e1_points,
        h2_points=h2_points,
        psi_step=float(pick("psi_step")),
    )
    grid = label_regions(scan_plane(spec, threads=threads))
    text = export_grid(grid, fmt)
    if fmt == "csv":
        text = f"# {SCHEMA} config: {json.dumps(spec.to_dict())}\n" + text
    if args.out:
        _write_atomic(args.out, text)
        counts = {str(k): int((grid.labels == k).sum()) for k in (1, 2, 3, 4)}
        summary = {"command": "scan", "config": spec.to_dict(),
                   "out": args.out, "format": fmt, "region_counts": counts}
        if args.json:
            print(json.dumps(summary))
        else:
            print(f"wrote {args.out} ({fmt}); region counts: "
                  + " ".join(f"{k}:{v}" for k, v in counts.items()))
    else:
        sys.stdout.write(text)
    return 0


def _cmd_dump_matrices(args):
    state = _read_state(args)
    nu = _parse_vec3(args.nu, "--nu")
    slopes = _parse_vec3(args.slopes, "--slopes")
    plasma = build_plasma_matrices(state)
    vacuum = build_vacuum_matrices(state)
    secondary = build_secondary_symmetrizer(np.array(nu))
    boundary = build_boundary_matrix(slopes[0], slopes[1], slopes[2],
                                     state.epsilon)
    groups = {
        "plasma": {k: _matrix(getattr(plasma, k))
                   for k in ("A0", "A1", "A2", "A3",
                             "A1_hat", "A2_hat", "A3_hat")},
        "vacuum": {k: _matrix(getattr(vacuum, k))
                   for k in ("B1", "B2", "B3", "B1_hat")},
        "secondary": {k: _matrix(getattr(secondary, k))
                      for k in ("SB0", "SB1", "SB2", "SB3")},
        "boundary": {"Bfrak": _matrix(boundary.Bfrak),
                     "eigenvalues": _matrix(boundary.eigenvalues)},
    }
    payload = {
        "command": "dump-matrices",
        "config": {"nu": list(nu), "slopes": list(slopes)},
        "state": state_to_dict(state),
        **groups,
    }
    lines = []
    for group, mats in groups.items():
        for name, mat in mats.items():
            lines.append(f"{group}.{name} =")
            lines.append(np.array2string(
                np.asarray(mat), precision=17, max_line_width=120,
                separator=", "))
    _emit(args, payload, lines)
    return 0


def _add_state_arguments(sub):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--in", dest="input", metavar="PATH",
                       help="path to a state JSON file")
    group.add_argument("--state", dest="inline", metavar="JSON",
                       help="inline state JSON")


def _add_output_arguments(sub):
    sub.add_argument("--json", action="store_true",
                     help="machine-readable output on stdout")
    sub.add_argument("--out", metavar="PATH",
                     help="also write the result to PATH (atomically)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvstab",
        description="stability toolkit for a planar plasma-vacuum interface",
        epilog=_STATE_SCHEMA,
    )
    parser.add_argument("--version", action="version",
                        version=f"pvstab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser(
        "check-stability", epilog=_STATE_SCHEMA,
        help="energy-form sufficient stability condition")
    _add_state_arguments(check)
    _add_output_arguments(check)
    check.set_defaults(handler=_cmd_check_stability)

    roots = sub.add_parser(
        "roots", epilog=_STATE_SCHEMA,
        help="growing normal modes of a state")
    _add_state_arguments(roots)
    _add_output_arguments(roots)
    roots.add_argument("--psi", type=float, default=None,
                       help="single wave-vector angle (default: scan the "
                            "angle grid and classify)")
    roots.add_argument("--psi-step", dest="psi_step", type=float,
                       default=None, help="angle grid step (default 1e-2)")
    roots.add_argument("--config", metavar="PATH",
                       help="JSON config file (CLI flags win)")
    roots.set_defaults(handler=_cmd_roots)

    scan = sub.add_parser("scan", help="stability map of the (E1, Hv2) plane")
    scan.add_argument("--H3", type=float, default=None,
                      help="plasma tangential field strength (required)")
    scan.add_argument("--epsilon", type=float, default=None,
                      help="light-speed ratio (default 1e-6)")
    scan.add_argument("--grid", default=None, metavar="N1xN2",
                      help="grid resolution (default 100x100)")
    scan.add_argument("--e1-range", dest="e1_range", default=None,
                      metavar="LO:HI", help="E1 interval (default 0:2)")
    scan.add_argument("--h2-range", dest="h2_range", default=None,
                      metavar="LO:HI", help="Hv2 interval (default 0:2)")
    scan.add_argument("--psi-step", dest="psi_step", type=float, default=None,
                      help="angle grid step (default 1e-2)")
    scan.add_argument("--format", choices=("csv", "json", "plotscript"),
                      default=None, help="artifact format (default csv)")
    scan.add_argument("--threads", type=int, default=None,
                      help=f"worker threads (fallback: ${THREADS_ENV})")
    scan.add_argument("--config", metavar="PATH",
                      help="JSON config file (CLI flags win)")
    scan.add_argument("--out", metavar="PATH",
                      help="write the artifact to PATH (atomically); "
                           "otherwise print to stdout")
    scan.add_argument("--json", action="store_true",
                      help="machine-readable summary when --out is used")
    scan.set_defaults(handler=_cmd_scan)

    dump = sub.add_parser(
        "dump-matrices", epilog=_STATE_SCHEMA,
        help="structural coefficient matrices of a state")
    _add_state_arguments(dump)
    _add_output_arguments(dump)
    dump.add_argument("--nu", default="0,0,0", metavar="N1,N2,N3",
                      help="secondary symmetrizer mixing vector")
    dump.add_argument("--slopes", default="0,0,0", metavar="DT,D2,D3",
                      help="interface slopes for the boundary matrix")
    dump.set_defaults(handler=_cmd_dump_matrices)
    return parser


def run_command(argv=None) -> int:
    """Parse argv, dispatch, and map exceptions to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(_STATE_SCHEMA, file=sys.stderr)
        return 2
    except UnsupportedCase as exc:
        print(f"unsupported case: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
