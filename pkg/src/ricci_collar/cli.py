"""Batch command-line front end.

Subcommands: feasibility, solve, verify, canonical, einstein.  Each reads a
flat ``key = value`` config file, runs the corresponding library operation,
writes CSV/report files next to the requested output prefix, and prints a
single machine-readable ``STATUS key=value ...`` line on stdout.  All
diagnostics go to stderr.

Exit codes:
    0  success
    2  infeasible boundary data (or an Einstein boundary obstruction)
    3  integration breakdown before the requested collar depth
    4  config or expression parse error
    5  internal numerical failure
"""

from __future__ import annotations

import argparse
import concurrent.futures
import math
import sys
from pathlib import Path

from .collar import (
    CollarSolution,
    Verdict,
    canonical_gauge,
    feasibility,
    metrics_match,
    solve_collar,
    verify_ricci,
)
from .einstein import (
    BoundaryMatch,
    EinsteinSpec,
    Obstruction,
    boundary_match,
    core_regularity,
    einstein_profiles,
)
from .errors import (
    DomainError,
    ImmediateBreakdown,
    InfeasibleBoundaryData,
    IntegrationFailure,
    InvalidConstant,
    InvalidS0,
    NonFiniteResult,
    NonPositiveMetric,
    ParseError,
)
from .expr import Jet2
from .geometry import (
    BoundaryData,
    RotSymMetric,
    RotSymTensor,
    constraint_residual,
    ricci_components,
)
from .ode import IntegratorControls, TerminationKind

__all__ = ["run", "main"]

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_BREAKDOWN = 3
EXIT_CONFIG = 4
EXIT_NUMERICAL = 5

PROFILE_CSV_HEADER = (
    "r,f,g,h,f_r,g_r,h_r,ric_ll,ric_mm,ric_rr,phi,psi,sigma,constraint_residual"
)
EINSTEIN_CSV_HEADER = "s,fbar,gbar,ric_ll,ric_mm,ric_ss,residual"

_KNOWN_KEYS = {
    "x", "phi", "psi", "sigma", "f", "g", "h",
    "alpha", "beta", "eta", "theta",
    "rtol", "atol", "initial_step", "min_step", "max_step", "max_steps",
    "samples", "y0", "tau", "c", "s0", "out",
}

_EXPR_KEYS = {"phi", "psi", "sigma", "f", "g", "h"}


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def load_config(path: Path) -> dict[str, str]:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
        cfg[key] = value
    return cfg


def _get_float(cfg: dict, key: str, default: float | None = None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key '{key}'")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}': not a number: {cfg[key]!r}") from exc


def _get_int(cfg: dict, key: str, default: int) -> int:
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"key '{key}': not an integer: {cfg[key]!r}") from exc


def _get_expr(cfg: dict, key: str) -> str:
    if key not in cfg or not cfg[key]:
        raise ConfigError(f"missing required expression '{key}'")
    return cfg[key]


def _controls(cfg: dict, args) -> IntegratorControls:
    rtol = args.rtol if args.rtol is not None else _get_float(cfg, "rtol", 1e-10)
    return IntegratorControls(
        rtol=rtol,
        atol=_get_float(cfg, "atol", 1e-12),
        initial_step=_get_float(cfg, "initial_step", 1e-3),
        min_step=_get_float(cfg, "min_step", 1e-12),
        max_steps=_get_int(cfg, "max_steps", 100_000),
        max_step=_get_float(cfg, "max_step", math.inf),
    )


def _samples(cfg: dict, args) -> int:
    if args.samples is not None:
        return args.samples
    return _get_int(cfg, "samples", 200)


def _tensor(cfg: dict) -> RotSymTensor:
    x = _get_float(cfg, "x", 1.0)
    return RotSymTensor.from_profiles(
        _get_expr(cfg, "phi"), _get_expr(cfg, "psi"), _get_expr(cfg, "sigma"), x
    )


def _metric(cfg: dict) -> RotSymMetric:
    x = _get_float(cfg, "x", 1.0)
    return RotSymMetric.from_profiles(
        _get_expr(cfg, "f"), _get_expr(cfg, "g"), _get_expr(cfg, "h"), x
    )


def _boundary(cfg: dict) -> BoundaryData:
    try:
        return BoundaryData(
            alpha=_get_float(cfg, "alpha"),
            beta=_get_float(cfg, "beta"),
            eta=_get_float(cfg, "eta"),
            theta=_get_float(cfg, "theta"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _status(pairs: dict) -> None:
    parts = []
    for key, value in pairs.items():
        if isinstance(value, float):
            parts.append(f"{key}={_fmt(value)}")
        else:
            parts.append(f"{key}={value}")
    print("STATUS " + " ".join(parts))


def _write(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_feasibility(cfg: dict, args, prefix: Path) -> int:
    T = _tensor(cfg)
    bd = _boundary(cfg)
    phi1, psi1, sigma1 = T.values(1.0)
    rep = feasibility(phi1, psi1, sigma1, bd)
    lines = [
        "feasibility report",
        f"phi(1) = {_fmt(phi1)}",
        f"psi(1) = {_fmt(psi1)}",
        f"sigma(1) = {_fmt(sigma1)}",
        f"numerator 2*eta*theta + beta^2*phi(1) + alpha^2*psi(1) = {_fmt(rep.numerator)}",
        f"verdict = {rep.verdict.value}",
    ]
    if rep.q is not None:
        lines.append(f"Q = {_fmt(rep.q)} ({'positive' if rep.q > 0 else 'nonpositive'})")
    if rep.h1 is not None:
        lines.append(f"h(1) = alpha*beta/sqrt(Q) = {_fmt(rep.h1)}")
        lines.append(f"outward normal coefficient 1/h(1) = {_fmt(rep.normal_coefficient)}")
    if args.out is not None or "out" in cfg:
        _write(prefix.with_name(prefix.name + ".report.txt"), lines)
    status = {"cmd": "feasibility", "verdict": rep.verdict.value}
    if rep.q is not None:
        status["Q"] = rep.q
    if rep.h1 is not None:
        status["h1"] = rep.h1
    ok = rep.verdict in (Verdict.FEASIBLE, Verdict.DEGENERATE_SIGMA_CONSISTENT)
    code = EXIT_OK if ok else EXIT_INFEASIBLE
    if not ok:
        if rep.q is not None:
            _diag(
                f"infeasible boundary data: Q = {_fmt(rep.q)} is "
                f"{'negative' if rep.q < 0 else 'zero'}, but the construction needs Q > 0"
            )
        else:
            _diag(
                "degenerate sigma(1) = 0 with nonvanishing numerator "
                f"{_fmt(rep.numerator)}: no solution matches this boundary data"
            )
    status["exit"] = code
    _status(status)
    return code


def _profile_rows(solution: CollarSolution, T: RotSymTensor) -> list[str]:
    rows = [PROFILE_CSV_HEADER]
    metric = solution.metric
    for r in metric.f.rs:
        fj, gj, hj = metric.jets(float(r))
        ric = ricci_components(fj, gj, hj)
        phi_v, psi_v, sig_v = T.values(float(r))
        resid = constraint_residual(fj, gj, hj, phi_v, psi_v, sig_v)
        rows.append(
            ",".join(
                _fmt(v)
                for v in (
                    r, fj.v0, gj.v0, hj.v0, fj.v1, gj.v1, hj.v1,
                    ric.ll, ric.mm, ric.rr, phi_v, psi_v, sig_v, resid,
                )
            )
        )
    return rows


def _solution_report(solution: CollarSolution, x: float) -> list[str]:
    res = solution.residuals
    rep = solution.feasibility
    bd_in = solution.boundary
    from .geometry import boundary_data_of

    bd_out = boundary_data_of(solution.metric)
    term = solution.termination
    return [
        "collar solve report",
        f"verdict = {rep.verdict.value}",
        f"Q = {_fmt(rep.q)}",
        f"h(1) target alpha*beta/sqrt(Q) = {_fmt(rep.h1)}",
        f"h(1) reconstructed = {_fmt(solution.metric.h.values[-1])}",
        f"requested collar width x = {_fmt(x)}",
        f"achieved epsilon = {_fmt(solution.epsilon)}",
        f"achieved epsilon0 = {_fmt(solution.epsilon0)}",
        f"termination = {term.kind.value}"
        + (f" ({term.reason})" if term.reason else ""),
        f"verification samples = {res.n_samples} on ({_fmt(res.r_lo)}, {_fmt(res.r_hi)}]",
        f"max |Ric_ll - phi| = {_fmt(res.max_ll)} at r = {_fmt(res.argmax_ll)}",
        f"max |Ric_mm - psi| = {_fmt(res.max_mm)} at r = {_fmt(res.argmax_mm)}",
        f"max |Ric_rr - sigma| = {_fmt(res.max_rr)} at r = {_fmt(res.argmax_rr)}",
        f"max |first-integral residual| = {_fmt(res.max_constraint)}"
        f" at r = {_fmt(res.argmax_constraint)}",
        f"boundary alpha: in {_fmt(bd_in.alpha)} out {_fmt(bd_out.alpha)}",
        f"boundary beta:  in {_fmt(bd_in.beta)} out {_fmt(bd_out.beta)}",
        f"boundary eta:   in {_fmt(bd_in.eta)} out {_fmt(bd_out.eta)}",
        f"boundary theta: in {_fmt(bd_in.theta)} out {_fmt(bd_out.theta)}",
    ]


def _cmd_solve(cfg: dict, args, prefix: Path) -> int:
    T = _tensor(cfg)
    bd = _boundary(cfg)
    controls = _controls(cfg, args)
    n = _samples(cfg, args)
    try:
        solution = solve_collar(T, bd, controls, n_verify=n)
    except InfeasibleBoundaryData as exc:
        _diag(f"infeasible boundary data: {exc}")
        _status({"cmd": "solve", "exit": EXIT_INFEASIBLE, "error": "infeasible"})
        return EXIT_INFEASIBLE
    except ImmediateBreakdown as exc:
        _diag(f"breakdown at the boundary: {exc}")
        _status({"cmd": "solve", "exit": EXIT_BREAKDOWN, "error": "immediate_breakdown"})
        return EXIT_BREAKDOWN

    csv_path = prefix.with_name(prefix.name + ".profiles.csv")
    _write(csv_path, _profile_rows(solution, T))
    _write(
        prefix.with_name(prefix.name + ".report.txt"),
        _solution_report(solution, T.collar.x),
    )

    term = solution.termination
    full_depth = term.kind is TerminationKind.REACHED_END
    code = EXIT_OK if full_depth else EXIT_BREAKDOWN
    if not full_depth:
        _diag(
            f"integration stopped before the requested depth at r = {_fmt(term.r_stop)}:"
            f" {term.reason}"
        )
    res = solution.residuals
    _status(
        {
            "cmd": "solve",
            "exit": code,
            "verdict": solution.feasibility.verdict.value,
            "Q": solution.feasibility.q,
            "h1": solution.feasibility.h1,
            "epsilon": solution.epsilon,
            "epsilon0": solution.epsilon0,
            "termination": term.kind.value,
            "max_ric_residual": res.max_ricci,
            "max_constraint_residual": res.max_constraint,
            "rows": len(solution.metric.f.rs),
            "csv": csv_path.name,
        }
    )
    return code


def _cmd_verify(cfg: dict, args, prefix: Path) -> int:
    G = _metric(cfg)
    T = _tensor(cfg)
    n = _samples(cfg, args)
    res = verify_ricci(G, T, n)
    lines = [
        "verification report",
        f"samples = {res.n_samples} on ({_fmt(res.r_lo)}, {_fmt(res.r_hi)}]",
        f"max |Ric_ll - phi| = {_fmt(res.max_ll)} at r = {_fmt(res.argmax_ll)}",
        f"max |Ric_mm - psi| = {_fmt(res.max_mm)} at r = {_fmt(res.argmax_mm)}",
        f"max |Ric_rr - sigma| = {_fmt(res.max_rr)} at r = {_fmt(res.argmax_rr)}",
        f"max |first-integral residual| = {_fmt(res.max_constraint)}"
        f" at r = {_fmt(res.argmax_constraint)}",
    ]
    if args.out is not None or "out" in cfg:
        _write(prefix.with_name(prefix.name + ".report.txt"), lines)
    _status(
        {
            "cmd": "verify",
            "exit": EXIT_OK,
            "max_ric_residual": res.max_ricci,
            "max_constraint_residual": res.max_constraint,
        }
    )
    return EXIT_OK


def _cmd_canonical(cfg: dict, args, prefix: Path) -> int:
    G = _metric(cfg)
    y0 = _get_float(cfg, "y0", 0.0)
    controls = _controls(cfg, args)
    try:
        gauge = canonical_gauge(G, y0, controls)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    traj = gauge.trajectory
    rows = ["r,f_gauge,g_gauge,h_gauge,h_gauge_r"]
    for i, r in enumerate(gauge.h.rs):
        rows.append(
            ",".join(
                _fmt(v)
                for v in (
                    r,
                    gauge.f.values[i],
                    gauge.g.values[i],
                    gauge.h.values[i],
                    gauge.h.derivs[i],
                )
            )
        )
    csv_path = prefix.with_name(prefix.name + ".gauge.csv")
    _write(csv_path, rows)
    term = traj.status
    full_depth = term.kind is TerminationKind.REACHED_END
    code = EXIT_OK if full_depth else EXIT_BREAKDOWN
    if not full_depth:
        _diag(
            f"gauge integration stopped at r = {_fmt(term.r_stop)}: {term.reason}"
        )
    _write(
        prefix.with_name(prefix.name + ".report.txt"),
        [
            "canonical gauge report",
            f"y0 = {_fmt(y0)}",
            f"gauge interval = [{_fmt(traj.r_last)}, {_fmt(traj.r_terminal)}]",
            f"termination = {term.kind.value}"
            + (f" ({term.reason})" if term.reason else ""),
            f"rows = {len(gauge.h.rs)}",
        ],
    )
    _status(
        {
            "cmd": "canonical",
            "exit": code,
            "r_lo": traj.r_last,
            "r_hi": traj.r_terminal,
            "termination": term.kind.value,
            "csv": csv_path.name,
        }
    )
    return code


def _cmd_einstein(cfg: dict, args, prefix: Path) -> int:
    tau = _get_float(cfg, "tau")
    n = _samples(cfg, args)
    matched = None
    if "c" in cfg and "s0" in cfg:
        spec = EinsteinSpec(tau=tau, c=_get_float(cfg, "c"), s0=_get_float(cfg, "s0"))
    elif "alpha" in cfg and "beta" in cfg:
        result = boundary_match(tau, _get_float(cfg, "alpha"), _get_float(cfg, "beta"))
        if isinstance(result, Obstruction):
            _diag(
                f"no Einstein metric with tau = {_fmt(tau)} induces a boundary with "
                f"alpha = {_fmt(result.alpha)} >= 4*pi/kappa = {_fmt(result.threshold)}"
            )
            _status(
                {
                    "cmd": "einstein",
                    "exit": EXIT_INFEASIBLE,
                    "error": "obstruction",
                    "alpha": result.alpha,
                    "threshold": result.threshold,
                }
            )
            return EXIT_INFEASIBLE
        matched = result
        spec = EinsteinSpec(tau=tau, c=result.c, s0=result.s0)
    else:
        raise ConfigError("einstein needs either (c, s0) or (alpha, beta)")

    profiles = einstein_profiles(spec)
    unit = Jet2(1.0, 0.0, 0.0)
    rows = [EINSTEIN_CSV_HEADER]
    worst = 0.0
    for i in range(1, n + 1):
        s = spec.s0 * i / n
        fj = profiles.f.jet(s)
        gj = profiles.g.jet(s)
        ric = ricci_components(fj, gj, unit)
        resid = max(
            abs(ric.ll - tau * fj.v0 * fj.v0),
            abs(ric.mm - tau * gj.v0 * gj.v0),
            abs(ric.rr - tau),
        )
        worst = max(worst, resid)
        rows.append(
            ",".join(
                _fmt(v)
                for v in (s, fj.v0, gj.v0, ric.ll, ric.mm, ric.rr, resid)
            )
        )
    csv_path = prefix.with_name(prefix.name + ".einstein.csv")
    _write(csv_path, rows)
    core = core_regularity(profiles)
    _write(
        prefix.with_name(prefix.name + ".report.txt"),
        [
            "einstein family report",
            f"tau = {_fmt(tau)}, kappa = {_fmt(spec.kappa)}",
            f"c = {_fmt(spec.c)}, s0 = {_fmt(spec.s0)}",
            f"fbar = {profiles.f}",
            f"gbar = {profiles.g}",
            f"max |Ric - tau*G| over {n} samples = {_fmt(worst)}",
            "core regularity: "
            + ("pass" if core.passed else "FAIL")
            + f" (fbar(0) = {_fmt(core.f_value)},"
            + f" fbar_s(0) = {_fmt(core.f_slope)}, gbar_s(0) = {_fmt(core.g_slope)})",
        ],
    )
    status = {
        "cmd": "einstein",
        "exit": EXIT_OK,
        "tau": tau,
        "kappa": spec.kappa,
        "c": spec.c,
        "s0": spec.s0,
        "max_residual": worst,
        "core_regularity": "pass" if core.passed else "fail",
        "csv": csv_path.name,
    }
    if matched is not None:
        status["matched"] = "true"
    _status(status)
    return EXIT_OK


_COMMANDS = {
    "feasibility": _cmd_feasibility,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "canonical": _cmd_canonical,
    "einstein": _cmd_einstein,
}


def _out_prefix(args, cfg: dict, config_path: Path, multi: bool) -> Path:
    if "out" in cfg and args.out is None:
        return Path(cfg["out"])
    if args.out is not None:
        if multi:
            return Path(f"{args.out}.{config_path.stem}")
        return Path(args.out)
    return config_path.with_suffix("")


def _run_case(command: str, config_path: Path, args, multi: bool) -> int:
    try:
        cfg = load_config(config_path)
        prefix = _out_prefix(args, cfg, config_path, multi)
        return _COMMANDS[command](cfg, args, prefix)
    except ConfigError as exc:
        _diag(f"config error in {config_path}: {exc}")
        _status({"cmd": command, "exit": EXIT_CONFIG, "error": "config"})
        return EXIT_CONFIG
    except ParseError as exc:
        _diag(f"expression parse error in {config_path}: {exc}")
        _status({"cmd": command, "exit": EXIT_CONFIG, "error": "parse"})
        return EXIT_CONFIG
    except (InvalidS0, InvalidConstant) as exc:
        _diag(f"invalid Einstein constants in {config_path}: {exc}")
        _status({"cmd": command, "exit": EXIT_CONFIG, "error": "constants"})
        return EXIT_CONFIG
    except InfeasibleBoundaryData as exc:
        _diag(f"infeasible boundary data: {exc}")
        _status({"cmd": command, "exit": EXIT_INFEASIBLE, "error": "infeasible"})
        return EXIT_INFEASIBLE
    except ImmediateBreakdown as exc:
        _diag(f"breakdown at the boundary: {exc}")
        _status({"cmd": command, "exit": EXIT_BREAKDOWN, "error": "immediate_breakdown"})
        return EXIT_BREAKDOWN
    except (
        IntegrationFailure,
        NonPositiveMetric,
        DomainError,
        NonFiniteResult,
        ArithmeticError,
    ) as exc:
        _diag(f"numerical failure: {exc}")
        _status({"cmd": command, "exit": EXIT_NUMERICAL, "error": "numerical"})
        return EXIT_NUMERICAL


def run(argv: list[str]) -> int:
    """Entry point; returns the process exit code."""
    parser = argparse.ArgumentParser(
        prog="ricci-collar",
        description="Prescribed Ricci curvature on a solid-torus boundary collar.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("feasibility", "evaluate the boundary sign condition"),
        ("solve", "construct the collar metric with Ric(G) = T"),
        ("verify", "measure |Ric(G) - T| for given profiles"),
        ("canonical", "integrate the canonical gauge equation"),
        ("einstein", "closed-form Einstein profiles and residuals"),
    ):
        p = sub.add_parser(name, help=blurb)
        p.add_argument(
            "--config", action="append", required=True, metavar="PATH",
            help="config file (repeatable)",
        )
        p.add_argument("--out", metavar="PREFIX", help="output path prefix")
        p.add_argument("--samples", type=int, metavar="N", help="verification samples")
        p.add_argument("--rtol", type=float, metavar="X", help="integrator rtol")
        p.add_argument("--jobs", type=int, default=1, metavar="N",
                       help="run multiple configs concurrently")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG

    paths = [Path(p) for p in args.config]
    multi = len(paths) > 1
    if args.jobs > 1 and multi:
        with concurrent.futures.ThreadPoolExecutor(max_workers=args.jobs) as pool:
            codes = list(
                pool.map(lambda p: _run_case(args.command, p, args, multi), paths)
            )
    else:
        codes = [_run_case(args.command, p, args, multi) for p in paths]
    return max(codes)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
