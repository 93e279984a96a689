"""Config-driven command line: the package's only user-facing surface.

Plain INI configs (key = value sections), strict parsing (unknown keys
are errors), JSON reports with floats fixed to 17 significant digits,
CSV profiles, and a stable exit-code contract:

    0  success / all checks passed
    1  configuration error
    2  solver non-convergence or bracket failure
    3  condition-check or verification failure
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BracketNotFoundError,
    ConfigError,
    ConstraintInfeasibleError,
    ConvergenceError,
    DomainError,
    MultipleSignChangesError,
    NlsgroundError,
    NoSignChangeError,
    NotInLambdaError,
    PositivityBallError,
    PreconditionError,
    StiffIntegrationError,
)
from .functionals import FunctionalContext
from .grid import RadialFunction, make_grid
from .manifold import fiber_profile, project_to_M
from .model import make_nonlinearity, make_potential, run_condition_suite
from .solver import (
    SolveOptions,
    SolveReport,
    initial_bump,
    shoot_oracle,
    solve_fiber_descent,
    solve_limit_BL,
    sweep_lambda,
)
from .verify import run_suite

__all__ = ["RunConfig", "run", "main"]

COMMANDS = ("check-conditions", "solve", "solve-limit", "oracle-shoot",
            "project", "verify", "sweep-lambda")

# section -> key -> (type, default); None default means required-if-used
_SCHEMA = {
    "grid": {"N": (int, 3), "r_max": (float, 30.0), "n": (int, 4096)},
    "potential": {
        "family": (str, "constant"),
        "value": (float, None),
        "a": (float, None),
        "b": (float, None),
        "alpha": (float, 2.0),
        "v_inf": (float, None),
        "eps": (float, None),
        "shape": (str, "lorentzian"),
        "theta": (float, None),
    },
    "nonlinearity": {
        "family": (str, "power"),
        "p": (float, 4.0),
        "coeff": (float, 1.0),
        "c": (float, None),
    },
    "solver": {
        "max_iters": (int, 20000),
        "step": (float, 1.0),
        "grad_tol": (float, None),
        "poho_tol": (float, None),
        "amp": (float, 2.0),
        "width": (float, 1.5),
        "seed": (int, 0),
        "lam": (float, 1.0),
    },
    "sweep": {"lambda_grid": (str, ""), "t_cap": (float, 64.0)},
    "output": {"dir": (str, "out")},
}

_POTENTIAL_KEYS = {
    "constant": {"value"},
    "well": {"a", "b", "alpha", "theta"},
    "perturbed": {"v_inf", "eps", "shape", "theta"},
}
_NONLINEARITY_KEYS = {
    "power": {"p", "coeff"},
    "saturating": {"c"},
    "zero": set(),
}


@dataclass
class RunConfig:
    """Normalized configuration: section -> key -> typed value."""

    sections: dict = field(default_factory=dict)

    @staticmethod
    def from_ini(text: str) -> "RunConfig":
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keys are case-sensitive (grid has N and n)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        sections = {}
        for sec in parser.sections():
            if sec not in _SCHEMA:
                raise ConfigError(f"unknown config section [{sec}]")
            sections[sec] = {}
            for key, raw in parser.items(sec):
                if key not in _SCHEMA[sec]:
                    raise ConfigError(f"unknown key {key!r} in section [{sec}]")
                sections[sec][key] = _coerce(sec, key, raw)
        cfg = RunConfig(sections)
        cfg.validate()
        return cfg

    def validate(self):
        fam = self.get("potential", "family")
        if fam not in _POTENTIAL_KEYS:
            raise ConfigError(f"unknown potential family {fam!r}")
        given = set(self.sections.get("potential", {})) - {"family"}
        extra = given - _POTENTIAL_KEYS[fam]
        if extra:
            raise ConfigError(
                f"keys {sorted(extra)} do not apply to potential family {fam!r}")
        nfam = self.get("nonlinearity", "family")
        if nfam not in _NONLINEARITY_KEYS:
            raise ConfigError(f"unknown nonlinearity family {nfam!r}")
        extra = (set(self.sections.get("nonlinearity", {})) - {"family"}
                 - _NONLINEARITY_KEYS[nfam])
        if extra:
            raise ConfigError(
                f"keys {sorted(extra)} do not apply to nonlinearity family {nfam!r}")
        if self.get("grid", "N") < 3:
            raise ConfigError("grid.N must be >= 3")

    def get(self, sec: str, key: str):
        if key in self.sections.get(sec, {}):
            return self.sections[sec][key]
        return _SCHEMA[sec][key][1]

    def set(self, sec: str, key: str, raw: str):
        if sec not in _SCHEMA or key not in _SCHEMA[sec]:
            raise ConfigError(f"unknown config entry {sec}.{key}")
        self.sections.setdefault(sec, {})[key] = _coerce(sec, key, raw)

    def to_ini(self) -> str:
        lines = []
        for sec in _SCHEMA:
            if sec not in self.sections or not self.sections[sec]:
                continue
            lines.append(f"[{sec}]")
            for key in _SCHEMA[sec]:
                if key in self.sections[sec]:
                    lines.append(f"{key} = {_format_value(self.sections[sec][key])}")
            lines.append("")
        return "\n".join(lines)

    # ----- builders -------------------------------------------------

    def build_grid(self):
        try:
            return make_grid(self.get("grid", "N"), self.get("grid", "r_max"),
                             self.get("grid", "n"))
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def build_potential(self):
        fam = self.get("potential", "family")
        try:
            if fam == "constant":
                value = self.get("potential", "value")
                return make_potential("constant", value=1.0 if value is None else value)
            if fam == "well":
                return make_potential(
                    "well",
                    a=_required(self, "potential", "a"),
                    b=_required(self, "potential", "b"),
                    alpha=self.get("potential", "alpha"),
                    theta=self.get("potential", "theta"),
                )
            return make_potential(
                "perturbed",
                v_inf=_required(self, "potential", "v_inf"),
                eps=_required(self, "potential", "eps"),
                shape=self.get("potential", "shape"),
                theta=self.get("potential", "theta"),
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def build_nonlinearity(self):
        fam = self.get("nonlinearity", "family")
        try:
            if fam == "power":
                return make_nonlinearity("power", p=self.get("nonlinearity", "p"),
                                         coeff=self.get("nonlinearity", "coeff"))
            if fam == "saturating":
                return make_nonlinearity("saturating",
                                         c=_required(self, "nonlinearity", "c"))
            return make_nonlinearity("zero")
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def build_context(self):
        grid = self.build_grid()
        lam = self.get("solver", "lam")
        try:
            return FunctionalContext(grid, self.build_potential(),
                                     self.build_nonlinearity(), lam)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def build_options(self) -> SolveOptions:
        try:
            return SolveOptions(
                max_iters=self.get("solver", "max_iters"),
                step=self.get("solver", "step"),
                grad_tol=self.get("solver", "grad_tol"),
                poho_tol=self.get("solver", "poho_tol"),
                amp=self.get("solver", "amp"),
                width=self.get("solver", "width"),
                seed=self.get("solver", "seed"),
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def lambda_grid(self):
        raw = self.get("sweep", "lambda_grid").strip()
        if not raw:
            return None
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad sweep.lambda_grid: {raw!r}") from exc


def _coerce(sec: str, key: str, raw):
    if not isinstance(raw, str):
        return raw
    typ = _SCHEMA[sec][key][0]
    raw = raw.strip()
    if raw == "":
        return None
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{sec}.{key}: cannot parse {raw!r} as {typ.__name__}") from exc
    return raw


def _required(cfg: RunConfig, sec: str, key: str):
    val = cfg.get(sec, key)
    if val is None:
        raise ConfigError(f"missing required key {sec}.{key}")
    return val


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest text that round-trips exactly
    return str(v)


# ----------------------------------------------------------------------
# serialization
# ----------------------------------------------------------------------

def format_json(obj) -> str:
    """JSON text with every float rendered to 17 significant digits."""
    def walk(x):
        if isinstance(x, dict):
            return {k: walk(v) for k, v in x.items()}
        if isinstance(x, (list, tuple)):
            return [walk(v) for v in x]
        if isinstance(x, (bool, np.bool_)):
            return bool(x)
        if isinstance(x, (float, np.floating)):
            return _RawFloat(format(float(x), ".17g"))
        if isinstance(x, (int, np.integer)):
            return int(x)
        return x

    class _RawFloat:
        def __init__(self, text):
            self.text = text

    def encode(x, indent=0):
        pad = "  " * indent
        if isinstance(x, dict):
            if not x:
                return "{}"
            items = ",\n".join(
                f'{pad}  {json.dumps(str(k))}: {encode(v, indent + 1)}'
                for k, v in x.items())
            return "{\n" + items + "\n" + pad + "}"
        if isinstance(x, list):
            if not x:
                return "[]"
            items = ",\n".join(f"{pad}  {encode(v, indent + 1)}" for v in x)
            return "[\n" + items + "\n" + pad + "]"
        if isinstance(x, _RawFloat):
            return x.text
        return json.dumps(x)

    return encode(walk(obj)) + "\n"


def atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def profile_csv(u: RadialFunction) -> str:
    lines = ["r,u"]
    for r, v in zip(u.grid.r, u.values):
        lines.append(f"{r:.17g},{v:.17g}")
    return "\n".join(lines) + "\n"


def fiber_csv(rows) -> str:
    lines = ["t,zeta,P"]
    for t, z, p in rows:
        lines.append(f"{t:.17g},{z:.17g},{p:.17g}")
    return "\n".join(lines) + "\n"


def sweep_csv(report) -> str:
    lines = ["lambda,m_inf,c_bar,margin"]
    for row in report.rows:
        lines.append(f"{row['lambda']:.17g},{row['m_inf']:.17g},"
                     f"{row['c_bar']:.17g},{row['margin']:.17g}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------

def _cmd_check_conditions(cfg, out_dir, seed):
    ctx = cfg.build_context()
    suite = run_condition_suite(ctx.V, ctx.f, ctx.grid.N, ctx.grid.r_max)
    payload = {
        "theta_min": suite["theta_min"],
        "theta_v3": suite["theta_v3"],
        "pass": suite["pass"],
        "reports": {k: r.to_dict() for k, r in suite["reports"].items()},
    }
    atomic_write(os.path.join(out_dir, "conditions.json"), format_json(payload))
    status = "pass" if suite["pass"] else "FAIL"
    print(f"check-conditions: {status} theta_min={suite['theta_min']:.6g} "
          f"theta_v3={suite['theta_v3']:.6g}")
    return 0 if suite["pass"] else 3


def _solve_common(cfg, out_dir, routine, stem):
    ctx = cfg.build_context()
    opts = cfg.build_options()
    rep = routine(ctx, opts)
    atomic_write(os.path.join(out_dir, f"{stem}_report.json"),
                 format_json(rep.to_dict()))
    atomic_write(os.path.join(out_dir, f"{stem}_profile.csv"),
                 profile_csv(rep.u_star))
    print(f"{stem}: converged energy={rep.energy:.10g} "
          f"poho={rep.pohozaev_residual:.3e} pde={rep.pde_residual:.3e}")
    return 0


def _cmd_solve(cfg, out_dir, seed):
    suite = run_condition_suite(cfg.build_potential(), cfg.build_nonlinearity(),
                                cfg.get("grid", "N"), cfg.get("grid", "r_max"))
    if not suite["pass"]:
        print("solve: hypothesis checks failed; see conditions in the report")
        atomic_write(os.path.join(out_dir, "conditions.json"), format_json(
            {k: r.to_dict() for k, r in suite["reports"].items()}))
        return 3
    return _solve_common(cfg, out_dir, solve_fiber_descent, "solve")


def _cmd_solve_limit(cfg, out_dir, seed):
    def routine(ctx, opts):
        return solve_limit_BL(ctx.limit_context(), opts)

    return _solve_common(cfg, out_dir, routine, "solve_limit")


def _cmd_oracle_shoot(cfg, out_dir, seed):
    ctx = cfg.build_context()
    opts = cfg.build_options()
    rep = shoot_oracle(ctx.V.v_inf, ctx.f, ctx.grid.N, lam=ctx.lam,
                       grid=ctx.grid, opts=opts)
    atomic_write(os.path.join(out_dir, "shoot_report.json"),
                 format_json(rep.to_dict()))
    atomic_write(os.path.join(out_dir, "shoot_profile.csv"),
                 profile_csv(rep.u_star))
    print(f"oracle-shoot: u(0)={rep.u_at_zero:.12g} energy={rep.energy:.10g} "
          f"poho={rep.pohozaev_residual:.3e}")
    return 0


def _cmd_project(cfg, out_dir, seed):
    ctx = cfg.build_context()
    opts = cfg.build_options()
    u = initial_bump(ctx, opts.amp, opts.width)
    proj = project_to_M(ctx, u)
    t_grid = np.geomspace(max(proj.t_u / 8.0, 1e-3), proj.t_u * 8.0, 129)
    rows = fiber_profile(ctx, u, t_grid)
    payload = {
        "t_u": proj.t_u,
        "residual": proj.residual,
        "bracket": list(proj.bracket),
        "sign_changes": proj.sign_changes,
        "tolerance": proj.tolerance,
    }
    atomic_write(os.path.join(out_dir, "projection.json"), format_json(payload))
    atomic_write(os.path.join(out_dir, "fiber.csv"), fiber_csv(rows))
    atomic_write(os.path.join(out_dir, "projected_profile.csv"),
                 profile_csv(proj.projected))
    print(f"project: t_u={proj.t_u:.10g} residual={proj.residual:.3e} "
          f"sign_changes={proj.sign_changes}")
    return 0


def _load_solution(path: str, cfg: RunConfig) -> SolveReport:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read solution file {path}: {exc}") from exc
    gblock = data.get("grid", {})
    want = {"N": cfg.get("grid", "N"), "r_max": cfg.get("grid", "r_max"),
            "n": cfg.get("grid", "n")}
    if (gblock.get("N"), gblock.get("r_max"), gblock.get("n")) != (
            want["N"], want["r_max"], want["n"]):
        raise ConfigError(
            f"solution grid block {gblock} does not match config grid {want}")
    if "u" not in data:
        raise ConfigError("solution file has no profile values")
    grid = cfg.build_grid()
    u = RadialFunction(grid, np.asarray(data["u"], dtype=float))
    return SolveReport(
        converged=bool(data.get("converged", False)),
        u_star=u,
        energy=float(data.get("energy", 0.0)),
        pohozaev_residual=float(data.get("pohozaev_residual", np.inf)),
        pde_residual=float(data.get("pde_residual", np.inf)),
        iterations=int(data.get("iterations", 0)),
        route=str(data.get("route", "loaded")),
        u_at_zero=float(data.get("u_at_zero", u.values[0])),
        grad_tol=float(data.get("grad_tol", np.inf)),
        poho_tol=float(data.get("poho_tol", np.inf)),
    )


def _cmd_verify(cfg, out_dir, seed, solution_path=None):
    ctx = cfg.build_context()
    solution = _load_solution(solution_path, cfg) if solution_path else None
    report = run_suite(ctx, solution, seed=seed, opts=cfg.build_options())
    atomic_write(os.path.join(out_dir, "verification.json"),
                 format_json(report.to_dict()))
    status = "pass" if report.overall_pass else "FAIL"
    print(f"verify: {status} ({len(report.checks)} checks, seed={seed})")
    return 0 if report.overall_pass else 3


def _cmd_sweep(cfg, out_dir, seed):
    ctx = cfg.build_context()
    report = sweep_lambda(ctx, cfg.lambda_grid(), cfg.build_options(),
                          t_cap=cfg.get("sweep", "t_cap"))
    atomic_write(os.path.join(out_dir, "sweep.json"), format_json(report.to_dict()))
    atomic_write(os.path.join(out_dir, "sweep.csv"), sweep_csv(report))
    margins_ok = all(row["margin"] > 0.0 for row in report.rows)
    print(f"sweep-lambda: lambda_bar={report.lambda_bar:.6g} T={report.T:.6g} "
          f"rows={len(report.rows)} margins_positive={margins_ok}")
    return 0 if margins_ok else 3


_DISPATCH = {
    "check-conditions": _cmd_check_conditions,
    "solve": _cmd_solve,
    "solve-limit": _cmd_solve_limit,
    "oracle-shoot": _cmd_oracle_shoot,
    "project": _cmd_project,
    "verify": _cmd_verify,
    "sweep-lambda": _cmd_sweep,
}


def run(command: str, config_path: str, out_dir: str = None, seed: int = None,
        overrides=(), solution_path: str = None, dump_config: bool = False) -> int:
    """Execute one command; returns the process exit code."""
    if command not in COMMANDS:
        print(f"error: unknown command {command!r}", file=sys.stderr)
        return 1
    try:
        try:
            with open(config_path) as fh:
                cfg = RunConfig.from_ini(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"--set expects section.key=value, got {item!r}")
            key, _, value = item.partition("=")
            if "." not in key:
                raise ConfigError(f"--set expects section.key=value, got {item!r}")
            sec, _, k = key.partition(".")
            cfg.set(sec.strip(), k.strip(), value.strip())
        cfg.validate()
        if seed is not None:
            cfg.set("solver", "seed", str(seed))
        eff_seed = cfg.get("solver", "seed")
        if dump_config:
            sys.stdout.write(cfg.to_ini())
            return 0
        out = out_dir if out_dir is not None else cfg.get("output", "dir")
        os.makedirs(out, exist_ok=True)
        atomic_write(os.path.join(out, "config.ini"), cfg.to_ini())
        if command == "verify":
            return _cmd_verify(cfg, out, eff_seed, solution_path)
        return _DISPATCH[command](cfg, out, eff_seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, BracketNotFoundError, StiffIntegrationError,
            ConstraintInfeasibleError, NotInLambdaError, NoSignChangeError,
            MultipleSignChangesError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, PositivityBallError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 3
    except NlsgroundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="nlsground",
        description="Ground states of -Laplace(u) + V(|x|)u = f(u) by "
                    "dilation-constrained minimization, with verification suites.",
    )
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="path to the INI config")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--seed", type=int, default=None, help="override solver.seed")
    ap.add_argument("--set", action="append", default=[], metavar="SEC.KEY=VAL",
                    help="override one config entry (repeatable)")
    ap.add_argument("--solution", default=None,
                    help="solve report JSON for `verify`")
    ap.add_argument("--dump-config", action="store_true",
                    help="print the normalized config and exit")
    args = ap.parse_args(argv)
    code = run(args.command, args.config, out_dir=args.out, seed=args.seed,
               overrides=args.set, solution_path=args.solution,
               dump_config=args.dump_config)
    return code


if __name__ == "__main__":
    sys.exit(main())
