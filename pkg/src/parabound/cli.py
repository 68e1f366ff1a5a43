"""Command-line front end.

    parabound <solve|bound|optimize|sweep|verify> --config <path>
              [--output <path>] [--format json|csv] [--quiet]

Run configuration is a flat key-value text file with dotted section keys
(reproducible, diff-friendly):

    profile.kind = rectangular
    profile.omega0 = 1.0
    profile.omega1 = 2.0
    profile.start = 0.0
    profile.duration = 0.78539816339744831
    bounds.kinds = elementary, probe_omega0, probe_omega, interpolating, triangle, lower
    bounds.epsilons = 0.25, 0.5, 0.75

Exit codes: 0 success, 1 verification failure, 2 usage/config error,
3 numerical failure (non-convergence).

JSON output is deterministic: fixed key order and floats serialized with
17 significant digits.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

from . import verify as verify_module
from .bogoliubov import extract, scattering
from .bounds import (
    BoundReport,
    elementary_bound,
    interpolating_bound,
    lower_bound_report,
    probe_bound,
    triangle_bound,
)
from .errors import (
    InadmissibleProbe,
    NegativeOmegaSquared,
    ParaboundError,
    ParseError,
    QuadratureNotConverged,
    StepLimitExceeded,
    ValidationError,
)
from .probe_optimizer import OptimizerConfig, optimize_probe
from .probes import ProbeFunction
from .profiles import FrequencyProfile, ProfileSpec, load_tabulated_file, make_profile
from .propagator import SolverConfig, evolve, write_trajectory_csv
from .quadrature import QuadConfig

_BOUND_KINDS = ("elementary", "probe_omega0", "probe_omega", "interpolating",
                "triangle", "lower")
_DEFAULT_KINDS = _BOUND_KINDS


# --- deterministic serialization -----------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _json(value, indent: int = 0) -> str:
    pad = "  " * indent
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f'{pad}  {_json(k)}: {_json(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{pad}  {_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return _fmt_float(v)
    return str(v)


def _write_csv(stream, header: list[str], rows: list[list]) -> None:
    writer = csv.writer(stream, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])


# --- config parsing -------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    count: int


@dataclass(frozen=True)
class RunSpec:
    profile: ProfileSpec
    solver: SolverConfig
    quad: QuadConfig
    truncation_tol: float
    bound_kinds: tuple[str, ...]
    epsilons: tuple[float, ...]
    optimizer: OptimizerConfig
    optimizer_nodes: int
    split: Optional[ProfileSpec]
    sweep: Optional[SweepSpec]
    output_format: str
    output_path: Optional[str]
    trajectory_path: Optional[str]
    probe_csv_path: Optional[str]


_FLOAT_KEYS = {
    "profile.omega0", "profile.omega1", "profile.omega_sq_inside",
    "profile.start", "profile.duration", "profile.amplitude", "profile.sigma",
    "profile.width", "profile.energy", "profile.mass", "profile.hbar",
    "profile.truncation_tol",
    "solver.rel_tol", "solver.abs_tol", "solver.initial_step",
    "quad.abs_tol", "quad.rel_tol",
    "optimizer.grad_tol",
    "split.omega0", "split.omega1", "split.omega_sq_inside", "split.start",
    "split.duration",
    "sweep.start", "sweep.stop",
}
_INT_KEYS = {"solver.max_steps", "quad.max_subdivisions", "optimizer.nodes",
             "optimizer.max_iter", "sweep.count"}
_STR_KEYS = {"profile.kind", "profile.file", "split.kind", "sweep.parameter",
             "output.format", "output.path", "output.trajectory_path",
             "output.probe_csv", "bounds.kinds", "bounds.epsilons"}
_KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def _parse_lines(path) -> dict[str, str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw_lines = fh.readlines()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from None
    values: dict[str, str] = {}
    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KNOWN_KEYS:
            raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val
    return values


def _coerce(path, values: dict[str, str]) -> dict[str, object]:
    out: dict[str, object] = {}
    for key, val in values.items():
        if key in _FLOAT_KEYS:
            try:
                out[key] = float(val)
            except ValueError:
                raise ParseError(f"{path}: key {key}: not a number: {val!r}") from None
        elif key in _INT_KEYS:
            try:
                out[key] = int(val)
            except ValueError:
                raise ParseError(f"{path}: key {key}: not an integer: {val!r}") from None
        else:
            out[key] = val
    return out


def _profile_spec_from(path, vals: dict[str, object], prefix: str,
                       problems: list[str]) -> Optional[ProfileSpec]:
    kind = vals.get(f"{prefix}.kind")
    if kind is None:
        return None
    fields: dict[str, object] = {"kind": kind}
    mapping = {
        "omega0": f"{prefix}.omega0", "omega1": f"{prefix}.omega1",
        "omega_sq_inside": f"{prefix}.omega_sq_inside",
        "start": f"{prefix}.start", "duration": f"{prefix}.duration",
        "amplitude": f"{prefix}.amplitude", "sigma": f"{prefix}.sigma",
        "width": f"{prefix}.width", "energy": f"{prefix}.energy",
        "mass": f"{prefix}.mass", "hbar": f"{prefix}.hbar",
    }
    for attr, key in mapping.items():
        if key in vals:
            fields[attr] = vals[key]
    file_key = f"{prefix}.file"
    if file_key in vals:
        try:
            fields["samples"] = load_tabulated_file(vals[file_key])
        except OSError as exc:
            raise ParseError(f"{path}: {file_key}: cannot read "
                             f"{vals[file_key]!r}: {exc}") from None
        except ValueError as exc:
            raise ParseError(f"{path}: {file_key}: {exc}") from None
    if kind in ("tabulated", "from_potential") and "samples" not in fields:
        problems.append(f"{prefix}.kind = {kind} requires {prefix}.file")
    try:
        return ProfileSpec(**fields)
    except TypeError as exc:
        problems.append(f"bad {prefix} section: {exc}")
        return None


def load_config(path) -> RunSpec:
    """Parse and validate a run configuration.

    ParseError carries line/field context; ValidationError lists every
    violated invariant at once.
    """
    vals = _coerce(path, _parse_lines(path))
    problems: list[str] = []

    profile = _profile_spec_from(path, vals, "profile", problems)
    if profile is None and "profile.kind" not in vals:
        problems.append("profile.kind is required")
    split_spec = _profile_spec_from(path, vals, "split", problems)

    solver_kwargs = {}
    for attr, key in (("rel_tol", "solver.rel_tol"), ("abs_tol", "solver.abs_tol"),
                      ("initial_step", "solver.initial_step"),
                      ("max_steps", "solver.max_steps")):
        if key in vals:
            solver_kwargs[attr] = vals[key]
    trajectory_path = vals.get("output.trajectory_path")
    try:
        solver = SolverConfig(record_trajectory=trajectory_path is not None,
                              **solver_kwargs)
    except ValueError as exc:
        problems.append(str(exc))
        solver = SolverConfig(record_trajectory=trajectory_path is not None)

    quad_kwargs = {}
    for attr, key in (("abs_tol", "quad.abs_tol"), ("rel_tol", "quad.rel_tol"),
                      ("max_subdivisions", "quad.max_subdivisions")):
        if key in vals:
            quad_kwargs[attr] = vals[key]
    try:
        quad = QuadConfig(**quad_kwargs)
    except ValueError as exc:
        problems.append(str(exc))
        quad = QuadConfig()

    truncation_tol = vals.get("profile.truncation_tol", 1e-8)
    if not (0.0 < truncation_tol <= 1e-3):
        problems.append(f"profile.truncation_tol must lie in (0, 1e-3], "
                        f"got {truncation_tol}")
        truncation_tol = 1e-8

    kinds_raw = vals.get("bounds.kinds")
    if kinds_raw is None:
        kinds = _DEFAULT_KINDS
    else:
        kinds = tuple(k.strip() for k in kinds_raw.split(",") if k.strip())
        for k in kinds:
            if k not in _BOUND_KINDS:
                problems.append(f"bounds.kinds: unknown kind {k!r} "
                                f"(valid: {', '.join(_BOUND_KINDS)})")
    eps_raw = vals.get("bounds.epsilons")
    if eps_raw is None:
        epsilons = (0.25, 0.5, 0.75)
    else:
        epsilons = ()
        for item in eps_raw.split(","):
            item = item.strip()
            if not item:
                continue
            try:
                epsilons += (float(item),)
            except ValueError:
                problems.append(f"bounds.epsilons: not a number: {item!r}")
        for e in epsilons:
            if not (0.0 <= e <= 1.0):
                problems.append(f"bounds.epsilons: epsilon {e} outside [0, 1]")

    opt_kwargs = {}
    if "optimizer.max_iter" in vals:
        opt_kwargs["max_iter"] = vals["optimizer.max_iter"]
    if "optimizer.grad_tol" in vals:
        opt_kwargs["grad_tol"] = vals["optimizer.grad_tol"]
    try:
        optimizer = OptimizerConfig(**opt_kwargs)
    except ValueError as exc:
        problems.append(str(exc))
        optimizer = OptimizerConfig()
    optimizer_nodes = vals.get("optimizer.nodes", 256)
    if optimizer_nodes < 16:
        problems.append(f"optimizer.nodes must be >= 16, got {optimizer_nodes}")

    sweep = None
    if "sweep.parameter" in vals:
        missing = [k for k in ("sweep.start", "sweep.stop", "sweep.count")
                   if k not in vals]
        if missing:
            problems.append(f"sweep requires {', '.join(missing)}")
        else:
            param = vals["sweep.parameter"]
            if not param.startswith("profile."):
                problems.append(
                    f"sweep.parameter must name a profile field, got {param!r}")
            count = vals["sweep.count"]
            if count < 1:
                problems.append(f"sweep.count must be >= 1, got {count}")
            sweep = SweepSpec(param, vals["sweep.start"], vals["sweep.stop"], count)

    output_format = vals.get("output.format", "json")
    if output_format not in ("json", "csv"):
        problems.append(f"output.format must be json or csv, got {output_format!r}")

    if problems:
        raise ValidationError("; ".join(problems))

    return RunSpec(
        profile=profile, solver=solver, quad=quad, truncation_tol=truncation_tol,
        bound_kinds=kinds, epsilons=epsilons, optimizer=optimizer,
        optimizer_nodes=optimizer_nodes, split=split_spec, sweep=sweep,
        output_format=output_format, output_path=vals.get("output.path"),
        trajectory_path=trajectory_path,
        probe_csv_path=vals.get("output.probe_csv"),
    )


# --- command implementations ----------------------------------------------

def _solve_record(spec: RunSpec, profile: FrequencyProfile) -> dict:
    if spec.solver.record_trajectory:
        T, trajectory = evolve(profile, spec.solver)
        write_trajectory_csv(spec.trajectory_path, trajectory)
    else:
        T = evolve(profile, spec.solver)
    co = extract(T, profile.omega0, profile.t_i, profile.t_f)
    sc = scattering(co)
    return {
        "a": T.a, "b": T.b, "c": T.c, "d": T.d,
        "det_drift": T.det_drift(),
        "alpha_re": co.alpha.real, "alpha_im": co.alpha.imag,
        "beta_re": co.beta.real, "beta_im": co.beta.imag,
        "beta_sq": co.beta_sq,
        "transmission": sc.transmission, "reflection": sc.reflection,
    }


def _not_applicable(kind: str, epsilon: Optional[float], why: str) -> dict:
    report = BoundReport(kind=kind, epsilon=epsilon, integral=None,
                         beta_sq_bound=None, alpha_sq_bound=None,
                         transmission_lower=None, reflection_upper=None,
                         lower_beta_sq=None, applicable=False, quad_error=0.0)
    row = report.as_dict()
    row["note"] = why
    return row


def _bound_records(spec: RunSpec, profile: FrequencyProfile) -> list[dict]:
    rows: list[dict] = []
    for kind in spec.bound_kinds:
        try:
            if kind == "elementary":
                rows.append(elementary_bound(profile, spec.quad).as_dict())
            elif kind == "probe_omega0":
                probe = ProbeFunction.constant(profile.omega0, profile.t_i, profile.t_f)
                rows.append(probe_bound(profile, probe, spec.quad).as_dict())
            elif kind == "probe_omega":
                probe = ProbeFunction.from_profile_omega(profile)
                rows.append(probe_bound(profile, probe, spec.quad).as_dict())
            elif kind == "triangle":
                probe = ProbeFunction.from_profile_omega(profile)
                rows.append(triangle_bound(profile, probe, spec.quad).as_dict())
            elif kind == "interpolating":
                for eps in spec.epsilons:
                    rows.append(interpolating_bound(profile, eps, spec.quad).as_dict())
            elif kind == "lower":
                T = evolve(profile, spec.solver)
                rows.append(lower_bound_report(T).as_dict())
        except (InadmissibleProbe, NegativeOmegaSquared) as exc:
            eps = None
            rows.append(_not_applicable(kind, eps, str(exc)))
    return rows


def _optimize_record(spec: RunSpec, profile: FrequencyProfile) -> dict:
    probe, report, diags = optimize_probe(profile, spec.optimizer_nodes,
                                          spec.optimizer, spec.quad)
    if spec.probe_csv_path:
        probe.write_csv(spec.probe_csv_path)
    return {
        "action_value": diags.action_value,
        "iterations": diags.iterations,
        "converged": diags.converged,
        "el_residual_inf": diags.el_residual_inf,
        "endpoint_momentum": list(diags.endpoint_momentum),
        "endpoint_hamiltonian": list(diags.endpoint_hamiltonian),
        "bound": report.as_dict(),
    }


def _sweep_field(parameter: str) -> str:
    return parameter.split(".", 1)[1]


def _sweep_rows(spec: RunSpec) -> tuple[list[str], list[list]]:
    sw = spec.sweep
    attr = _sweep_field(sw.parameter)
    if sw.count == 1:
        values = [sw.start]
    else:
        step = (sw.stop - sw.start) / (sw.count - 1)
        values = [sw.start + k * step for k in range(sw.count)]

    upper_kinds = [k for k in spec.bound_kinds if k != "lower"]
    header = ["index", "value", "beta_sq_exact", "lower_beta_sq", "lower_applicable"]
    for kind in upper_kinds:
        if kind == "interpolating":
            for eps in spec.epsilons:
                header += [f"interpolating_{eps}_integral",
                           f"interpolating_{eps}_beta_sq_bound"]
        else:
            header += [f"{kind}_integral", f"{kind}_beta_sq_bound"]

    rows = []
    for idx, value in enumerate(values):
        pspec = replace(spec.profile, **{attr: value})
        profile = make_profile(pspec, spec.truncation_tol)
        T = evolve(profile, spec.solver)
        co = extract(T, profile.omega0, profile.t_i, profile.t_f)
        lower = lower_bound_report(T)
        row: list = [idx, value, co.beta_sq, lower.lower_beta_sq, lower.applicable]
        for kind in upper_kinds:
            if kind == "interpolating":
                for eps in spec.epsilons:
                    try:
                        rep = interpolating_bound(profile, eps, spec.quad)
                        row += [rep.integral, rep.beta_sq_bound]
                    except (InadmissibleProbe, NegativeOmegaSquared):
                        row += [None, None]
                continue
            try:
                if kind == "elementary":
                    rep = elementary_bound(profile, spec.quad)
                elif kind == "probe_omega0":
                    rep = probe_bound(profile, ProbeFunction.constant(
                        profile.omega0, profile.t_i, profile.t_f), spec.quad)
                elif kind == "probe_omega":
                    rep = probe_bound(profile, ProbeFunction.from_profile_omega(profile),
                                      spec.quad)
                elif kind == "triangle":
                    rep = triangle_bound(profile, ProbeFunction.from_profile_omega(profile),
                                         spec.quad)
                row += [rep.integral, rep.beta_sq_bound]
            except (InadmissibleProbe, NegativeOmegaSquared):
                row += [None, None]
    # one CSV row per grid point, ordered by index
        rows.append(row)
    return header, rows


def _emit(spec: RunSpec, payload, csv_serializer=None) -> str:
    if spec.output_format == "json":
        return _json(payload) + "\n"
    buf = io.StringIO()
    header, rows = csv_serializer(payload)
    _write_csv(buf, header, rows)
    return buf.getvalue()


def _records_to_csv(records) -> tuple[list[str], list[list]]:
    if isinstance(records, dict):
        records = [records]
    keys: list[str] = []
    for rec in records:
        for k in rec:
            if k not in keys and not isinstance(rec[k], (dict, list)):
                keys.append(k)
    rows = [[rec.get(k) for k in keys] for rec in records]
    return keys, rows


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="parabound",
        description="Transfer matrices, Bogoliubov coefficients, and rigorous "
                    "bounds for phi'' + omega^2(t) phi = 0.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("solve", True), ("bound", True), ("optimize", True),
                               ("sweep", True), ("verify", False)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=needs_config,
                       help="flat key-value run configuration")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"),
                       help="override output.format from the config")
        p.add_argument("--quiet", action="store_true")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        return _dispatch(args)
    except (ParseError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (StepLimitExceeded, QuadratureNotConverged) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ParaboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "verify":
        ok = verify_module.run_all(quiet=args.quiet)
        return 0 if ok else 1

    spec = load_config(args.config)
    if args.format:
        spec = replace(spec, output_format=args.format)
    if args.output:
        spec = replace(spec, output_path=args.output)

    if args.command == "sweep":
        if spec.sweep is None:
            raise ValidationError("sweep command needs a sweep.* section")
        header, rows = _sweep_rows(spec)
        if spec.output_format == "json":
            payload = [dict(zip(header, row)) for row in rows]
            text = _json(payload) + "\n"
        else:
            buf = io.StringIO()
            _write_csv(buf, header, rows)
            text = buf.getvalue()
    else:
        profile = make_profile(spec.profile, spec.truncation_tol)
        if args.command == "solve":
            payload = _solve_record(spec, profile)
        elif args.command == "bound":
            payload = _bound_records(spec, profile)
        elif args.command == "optimize":
            payload = _optimize_record(spec, profile)
        if spec.output_format == "json":
            text = _json(payload) + "\n"
        else:
            buf = io.StringIO()
            header, rows = _records_to_csv(payload)
            _write_csv(buf, header, rows)
            text = buf.getvalue()

    if spec.output_path:
        with open(spec.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        if not args.quiet:
            print(f"wrote {spec.output_path}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
