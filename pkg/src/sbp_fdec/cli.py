"""Command-line drivers: ``simulate``, ``convergence`` and ``verify``.

Run configuration is a flat ``key = value`` text file (see docs/config.md).
Exit status: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy
import scipy.sparse as sp

from . import __version__
from .integrators import ConfigError, IntegratorConfig, RunResult, integrate
from .linalg import SolverError
from .maxwell import (
    STANDING_WAVE,
    initial_state,
    l2_difference,
    l2_errors,
    random_state,
    rhs_strong_faraday,
    rhs_weak,
)
from .mesh import MeshError, build_mesh
from .mimetic import element_ops
from .operators import (
    GlobalOperators2D,
    assemble,
    assemble_3d_complex,
    discrete_vector_calculus,
    poisson_matrix,
)
from .sbp import OperatorError, SbpOperator, get_operator, load_operator_file, operator_ids, verify_sbp

log = logging.getLogger("sbp_fdec")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

SIMULATE_HEADER = ["step", "t", "energy", "energy_drift", "div_max_nodal", "div_max_coeff"]
CONVERGENCE_HEADER = [
    "level", "elements_per_dim", "points_per_element", "err_E", "eoc_E", "err_B", "eoc_B",
]
MODES = ("elements", "points")


def fmt(x: float) -> str:
    return f"{x:.16e}"


# {{{ configuration


@dataclass(frozen=True)
class RunConfig:
    operator: str = "sbp_24"
    elements_x: int = 2
    elements_y: int = 2
    points: int = 12
    x_min: float = -1.0
    x_max: float = 1.0
    y_min: float = -1.0
    y_max: float = 1.0
    scheme: str = "ssprk3"
    dt: Optional[float] = None
    cfl: Optional[float] = None
    end_time: float = 1.0
    tolerance: float = 1e-12
    stride: int = 1
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self) -> None:
        if self.operator not in operator_ids():
            raise ConfigError(f"operator: unknown {self.operator!r}, expected one of {operator_ids()}")
        if self.elements_x < 1 or self.elements_y < 1:
            raise ConfigError("elements_x/elements_y: must be at least 1")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ConfigError("x_min/x_max/y_min/y_max: domain lengths must be positive")
        self.integrator()  # validates scheme, dt/cfl, end_time, tolerance, stride

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(
            scheme=self.scheme,
            end_time=self.end_time,
            dt=self.dt,
            cfl=self.cfl,
            tol=self.tolerance,
            stride=self.stride,
        )

    def build(self, elements: Optional[Tuple[int, int]] = None,
              points: Optional[int] = None) -> GlobalOperators2D:
        m_x, m_y = elements if elements is not None else (self.elements_x, self.elements_y)
        pts = self.points if points is None else points
        try:
            op = get_operator(self.operator, pts)
        except OperatorError as exc:
            raise ConfigError(f"points: {exc}") from exc
        mesh = build_mesh(m_x, m_y, pts - 1, (self.x_min, self.x_max), (self.y_min, self.y_max))
        return assemble(mesh, op)


@dataclass(frozen=True)
class ConvergenceStudy:
    """``mode = elements``: levels are elements per direction at fixed ``points``.
    ``mode = points``: levels are points per element on ``elements_x x elements_y``."""

    base: RunConfig
    mode: str = "elements"
    levels: Tuple[int, ...] = (1, 2)
    self_test: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigError(f"mode: unknown {self.mode!r}, expected one of {MODES}")
        if len(self.levels) < 2:
            raise ConfigError("levels: need at least two levels")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ConfigError("levels: must be strictly increasing")
        if self.levels[0] < 1:
            raise ConfigError("levels: must be positive")

    def level_setup(self, level: int) -> Tuple[Tuple[int, int], int]:
        if self.mode == "elements":
            return (level, level), self.base.points
        return (self.base.elements_x, self.base.elements_y), level


_RUN_FIELDS = {f for f in RunConfig.__dataclass_fields__}
_STUDY_FIELDS = {"mode", "levels", "self_test"}
_INT = {"elements_x", "elements_y", "points", "stride", "seed"}
_FLOAT = {"x_min", "x_max", "y_min", "y_max", "dt", "cfl", "end_time", "tolerance"}


def _convert(key: str, raw: str):
    try:
        if key in _INT:
            return int(raw)
        if key in _FLOAT:
            return float(raw)
        if key == "levels":
            return tuple(int(v) for v in raw.replace(",", " ").split())
        if key == "self_test":
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None
    return raw


def parse_config_text(text: str, allowed: Sequence[str]) -> Dict[str, object]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"config: {exc}") from exc
    out = {}
    for key, raw in parser["run"].items():
        if key not in allowed:
            raise ConfigError(f"{key}: unknown configuration key")
        out[key] = _convert(key, raw.strip())
    return out


def load_run_config(text: str) -> RunConfig:
    values = parse_config_text(text, sorted(_RUN_FIELDS))
    return RunConfig(**values)


def load_study(text: str) -> ConvergenceStudy:
    values = parse_config_text(text, sorted(_RUN_FIELDS | _STUDY_FIELDS))
    study = {k: values.pop(k) for k in list(values) if k in _STUDY_FIELDS}
    return ConvergenceStudy(base=RunConfig(**values), **study)


# }}}


# {{{ output


def write_csv(rows: List[List[str]], header: List[str], path: Optional[Path]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_NONE)
    writer.writerow(header)
    writer.writerows(rows)
    text = buf.getvalue()
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def write_manifest(path: Path, command: str, payload: Dict[str, object]) -> Path:
    manifest = {
        "command": command,
        "package_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "element_count_convention": "elements per direction",
        **payload,
    }
    target = path.with_name(path.name + ".manifest.json")
    target.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return target


def eoc(coarse: float, fine: float, ratio: float) -> Optional[float]:
    """``log(coarse / fine) / log(ratio)``; ``None`` when undefined."""
    if not (coarse > 0 and fine > 0) or not (math.isfinite(coarse) and math.isfinite(fine)):
        return None
    return math.log(coarse / fine) / math.log(ratio)


# }}}


# {{{ commands


def cmd_simulate(cfg: RunConfig, output: Optional[Path]) -> Tuple[RunResult, str]:
    ops = cfg.build()
    result = integrate(cfg.integrator(), ops)
    rows = [
        [str(s.step), fmt(s.t), fmt(s.energy), fmt(s.energy_drift), fmt(s.div_max_nodal),
         fmt(s.div_max_coeff)]
        for s in result.samples
    ]
    text = write_csv(rows, SIMULATE_HEADER, output)
    if output is not None:
        write_manifest(output, "simulate", {"config": asdict(cfg), "dt": result.dt,
                                            "n_steps": result.n_steps})
    return result, text


def run_level(study: ConvergenceStudy, level: int) -> Tuple[float, float]:
    elements, points = study.level_setup(level)
    ops = study.base.build(elements, points)
    if study.self_test:
        state = initial_state(ops, STANDING_WAVE)
        return l2_difference(ops, state, state)
    result = integrate(study.base.integrator(), ops)
    return l2_errors(ops, result.state, STANDING_WAVE)


def cmd_convergence(study: ConvergenceStudy, output: Optional[Path], jobs: int = 1):
    levels = list(study.levels)
    if jobs > 1 and len(levels) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(levels))) as pool:
            errors = list(pool.map(run_level, [study] * len(levels), levels))
    else:
        errors = []
        for lvl in levels:
            log.info("level %d", lvl)
            errors.append(run_level(study, lvl))

    rows = []
    for i, (lvl, (e_E, e_B)) in enumerate(zip(levels, errors)):
        elements, points = study.level_setup(lvl)
        eo_E = eo_B = None
        if i > 0:
            ratio = lvl / levels[i - 1]
            eo_E = eoc(errors[i - 1][0], e_E, ratio)
            eo_B = eoc(errors[i - 1][1], e_B, ratio)
        rows.append([
            str(i), str(elements[0]), str(points), fmt(e_E),
            "" if eo_E is None else fmt(eo_E), fmt(e_B), "" if eo_B is None else fmt(eo_B),
        ])
    text = write_csv(rows, CONVERGENCE_HEADER, output)
    if output is not None:
        write_manifest(output, "convergence", {
            "config": asdict(study.base),
            "mode": study.mode,
            "levels": levels,
            "self_test": study.self_test,
        })
    return errors, text


@dataclass
class Check:
    name: str
    value: float
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.value:.3e}"


@dataclass
class VerifyReport:
    checks: List[Check] = field(default_factory=list)

    def add(self, name: str, value: float, tol: float) -> None:
        self.checks.append(Check(name, float(value), bool(value <= tol)))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self) -> str:
        return "\n".join(c.line() for c in self.checks)


def _max_abs(a) -> float:
    a = sp.csr_array(a) if sp.issparse(a) else np.asarray(a)
    if sp.issparse(a):
        return float(np.max(np.abs(a.data), initial=0.0))
    return float(np.max(np.abs(a), initial=0.0))


def cmd_verify(op: SbpOperator, elements: Tuple[int, int] = (2, 2), seed: int = 0,
               samples: int = 20, tol: float = 1e-12) -> VerifyReport:
    report = VerifyReport()
    sbp = verify_sbp(op)
    report.add("SBP identity", sbp.sbp_identity, sbp.tol)
    report.add("row sums", sbp.row_sum, sbp.tol)
    report.add("boundary exactness", sbp.boundary_exactness, sbp.tol)
    report.add("interior exactness", sbp.interior_exactness, sbp.tol)

    elem = element_ops(op)
    report.add("D = V diff", _max_abs(op.D - elem.V @ elem.diff), 1e-13)

    mesh = build_mesh(elements[0], elements[1], op.N)
    ops = assemble(mesh, op)
    report.add("2D D_x = V_x diff_x", _max_abs(ops.deriv_x - ops.vander_x @ ops.diff_x), 1e-13)
    report.add("2D D_y = V_y diff_y", _max_abs(ops.deriv_y - ops.vander_y @ ops.diff_y), 1e-13)
    comm = ops.diff_x @ ops.diff_y - ops.diff_y @ ops.diff_x
    report.add("diff_x diff_y commutation", _max_abs(comm), 0.0)

    vc = discrete_vector_calculus(ops)
    report.add("2D curl o grad", _max_abs(vc.rot @ vc.grad), 1e-14)
    report.add("2D div o curl", _max_abs(vc.div @ vc.curl), 1e-14)
    if op.N <= 16:
        c3 = assemble_3d_complex(op)
        report.add("3D curl o grad", _max_abs(c3.curl @ c3.grad), 1e-14)
        report.add("3D div o curl", _max_abs(c3.div @ c3.curl), 1e-14)

    J, _ = poisson_matrix(ops)
    report.add("J antisymmetry", _max_abs(J + J.T), 1e-13)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        state = random_state(ops, rng)
        weak = rhs_weak(ops, state).bz
        strong = rhs_strong_faraday(ops, state)
        worst = max(worst, np.max(np.abs(weak - strong)) / max(np.max(np.abs(weak)), 1e-300))
    report.add("weak/strong Faraday equivalence", worst, tol)
    return report


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sbp-fdec", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one configuration and write diagnostics CSV")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--output", type=Path, help="CSV path (default: config 'output' or stdout)")

    p = sub.add_parser("convergence", help="run a refinement study and write an error/EOC table")
    p.add_argument("--config", required=True, type=Path)
    p.add_argument("--output", type=Path)
    p.add_argument("--jobs", type=int, default=1, help="levels computed concurrently")

    p = sub.add_parser("verify", help="check structural invariants of an operator")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--operator", default="sbp_24", choices=operator_ids())
    src.add_argument("--operator-file", type=Path)
    p.add_argument("--points", type=int, default=12)
    p.add_argument("--elements", type=int, nargs=2, default=(2, 2), metavar=("MX", "MY"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", type=Path, help="also write the report to this file")
    return parser


def _read_config(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc


def _output_path(arg: Optional[Path], cfg: RunConfig) -> Optional[Path]:
    if arg is not None:
        return arg
    return Path(cfg.output) if cfg.output else None


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "simulate":
            cfg = load_run_config(_read_config(args.config))
            out = _output_path(args.output, cfg)
            result, _ = cmd_simulate(cfg, out)
            last = result.samples[-1]
            print(
                f"t={last.t:.6g} steps={result.n_steps} dt={result.dt:.6g} "
                f"energy={last.energy:.16e} drift={last.energy_drift:.3e} "
                f"div_max_nodal={max(s.div_max_nodal for s in result.samples):.3e}",
                file=sys.stderr,
            )
        elif args.command == "convergence":
            if args.jobs < 1:
                raise ConfigError("jobs: must be at least 1")
            study = load_study(_read_config(args.config))
            cmd_convergence(study, _output_path(args.output, study.base), args.jobs)
        else:
            try:
                if args.operator_file is not None:
                    op = load_operator_file(args.operator_file, args.points, check=False)
                else:
                    op = get_operator(args.operator, args.points)
            except (OperatorError, OSError, ValueError) as exc:
                raise ConfigError(f"operator: {exc}") from exc
            report = cmd_verify(op, tuple(args.elements), args.seed)
            text = f"operator {op.name}, {op.n_nodes} points, {args.elements[0]}x{args.elements[1]} elements\n{report}\n"
            sys.stdout.write(text)
            if args.output is not None:
                args.output.write_text(text)
            return EXIT_OK if report.passed else EXIT_NUMERIC
    except (ConfigError, MeshError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
