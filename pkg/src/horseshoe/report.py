"""Verification orchestration and deterministic report emission.

The verify pipeline fans the per-time-step checks (strip mapping, cone
sweep, transition matrix, contraction probe) out over a thread pool,
then reduces everything into one VerificationReport with a global pass
flag.  Serialization is deterministic: fixed row order, reals at 17
significant digits, and a handwritten JSON emitter so byte-identical
configs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .cones import (
    A1Report,
    ConeReport,
    check_a1,
    check_a3_grid,
    derive_contraction,
    measure_contraction,
)
from .config import ConfigError, RunConfig
from .curves import ConvergenceError
from .geometry import (
    DegenerateGeometryError,
    InequalityRow,
    check_domain_inequalities,
    strip_separation_check,
)
from .refine import RefinementError
from .symbolic import compute_transition_matrix

__all__ = [
    "CLASSICAL_THRESHOLD",
    "StepResult",
    "VerificationReport",
    "format_real",
    "dumps_json",
    "write_json",
    "write_csv",
    "max_workers",
    "run_verification",
    "write_verification_outputs",
]

# Parameter value 5 + 2 sqrt(5) above which the autonomous quadratic
# map has a classical horseshoe; the report flags time steps where the
# modulated parameter dips below it while verification still passes.
CLASSICAL_THRESHOLD = 5.0 + 2.0 * math.sqrt(5.0)

# Probe depth for the per-step empirical width-contraction measurement.
_CONTRACTION_PROBE_DEPTH = 2

_STEP_ERRORS = (
    DegenerateGeometryError,
    RefinementError,
    ConvergenceError,
    ValueError,
)


def format_real(x: float) -> str:
    """Round-trip-exact decimal form of a float, 17 significant digits."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _json_real(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return f"{x:.17g}"


def dumps_json(value, _pad: str = "") -> str:
    """Deterministic JSON text: insertion-ordered keys, fixed float
    formatting.  The stdlib encoder formats floats with repr, which is
    round-trip exact but not pinned to a digit count; this emitter is.
    """
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _json_real(value)
    if value is None:
        return "null"
    if isinstance(value, str):
        return json.dumps(value)
    inner = _pad + "  "
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = ",\n".join(
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, inner)}"
            for k, v in value.items()
        )
        return "{\n" + items + "\n" + _pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = ",\n".join(f"{inner}{dumps_json(v, inner)}" for v in value)
        return "[\n" + items + "\n" + _pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} to JSON")


def write_json(path: str, value) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_json(value))
        fh.write("\n")


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_real(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])


def max_workers(task_count: int) -> int:
    """Thread-pool size: CPU count, capped by HORSESHOE_THREADS.

    Raises:
        ConfigError: HORSESHOE_THREADS set but not a positive integer.
    """
    workers = min(32, os.cpu_count() or 1, max(task_count, 1))
    cap = os.environ.get("HORSESHOE_THREADS")
    if cap is not None:
        try:
            cap_value = int(cap)
        except ValueError:
            cap_value = 0
        if cap_value < 1:
            raise ConfigError(
                f"HORSESHOE_THREADS must be a positive integer, got {cap!r}"
            )
        workers = min(workers, cap_value)
    return workers


@dataclass(frozen=True)
class StepResult:
    """All per-time-step verification outcomes at one n."""

    n: int
    a1: A1Report | None
    cone: ConeReport | None
    matrix: tuple[tuple[int, ...], ...] | None
    contraction_ratio: float | None
    contraction_ok: bool
    error: str | None

    @property
    def passed(self) -> bool:
        if self.error is not None or self.a1 is None or self.cone is None:
            return False
        return (
            self.a1.passed
            and self.cone.passed
            and self.cone.analytic_ok
            and self.contraction_ok
        )


@dataclass(frozen=True)
class VerificationReport:
    config: RunConfig
    domain_rows: tuple[InequalityRow, ...]
    separation_rows: tuple[InequalityRow, ...]
    steps: tuple[StepResult, ...]
    nu_v: float | None
    contraction_error: str | None
    min_a: float
    min_a_arg: int
    failures: tuple[str, ...]
    overall_pass: bool

    @property
    def remark_flag(self) -> bool:
        """Some scanned parameter value sits below the classical
        autonomous horseshoe threshold while verification passes."""
        return self.overall_pass and self.min_a < CLASSICAL_THRESHOLD

    def min_sector_margin(self) -> float:
        vals = [s.cone.worst_sector_margin for s in self.steps if s.cone]
        return min(vals) if vals else math.inf

    def min_expansion_ratio(self) -> float:
        vals = [s.cone.worst_expansion_ratio for s in self.steps if s.cone]
        return min(vals) if vals else math.inf

    def min_abs_y(self) -> float:
        vals = [s.cone.analytic_min_abs_y for s in self.steps if s.cone]
        return min(vals) if vals else math.inf

    def max_contraction_ratio(self) -> float | None:
        vals = [s.contraction_ratio for s in self.steps if s.contraction_ratio is not None]
        return max(vals) if vals else None

    def transition_all_ones(self) -> bool:
        return all(
            s.matrix is not None and all(all(e == 1 for e in row) for row in s.matrix)
            for s in self.steps
        )

    def summary_dict(self) -> dict:
        return {
            "config": self.config.as_dict(),
            "overall_pass": self.overall_pass,
            "nu_v": self.nu_v,
            "contraction_error": self.contraction_error,
            "min_sector_margin": self.min_sector_margin(),
            "min_expansion_ratio": self.min_expansion_ratio(),
            "min_abs_y": self.min_abs_y(),
            "max_measured_contraction": self.max_contraction_ratio(),
            "a1_all_pass": all(s.a1 is not None and s.a1.passed for s in self.steps),
            "transition_all_ones": self.transition_all_ones(),
            "remark": {
                "min_a": self.min_a,
                "argmin_n": self.min_a_arg,
                "classical_threshold": CLASSICAL_THRESHOLD,
                "below_classical_threshold": self.min_a < CLASSICAL_THRESHOLD,
                "flag": self.remark_flag,
            },
            "failures": list(self.failures),
        }


def _run_step(config: RunConfig, geom, seq, nu_v: float | None, n: int) -> StepResult:
    try:
        a1 = check_a1(seq, geom, n)
        cone = check_a3_grid(seq, geom, n, grid=config.grid)
        matrix = tuple(
            tuple(int(e) for e in row)
            for row in compute_transition_matrix(geom, n, certify_grid=config.grid)
        )
        probe = measure_contraction(
            seq, geom, n, depth=_CONTRACTION_PROBE_DEPTH
        )
        ratio = probe.max_ratio
        contraction_ok = nu_v is None or ratio <= nu_v
        return StepResult(
            n=n,
            a1=a1,
            cone=cone,
            matrix=matrix,
            contraction_ratio=ratio,
            contraction_ok=contraction_ok,
            error=None,
        )
    except _STEP_ERRORS as exc:
        return StepResult(
            n=n,
            a1=None,
            cone=None,
            matrix=None,
            contraction_ratio=None,
            contraction_ok=False,
            error=f"{type(exc).__name__}: {exc}",
        )


def run_verification(config: RunConfig) -> VerificationReport:
    """Run every check across the configured time window."""
    geom = config.geometry()
    seq = geom.seq
    n_lo, n_hi = config.n_window
    ns = list(range(n_lo, n_hi + 1))

    domain_rows = tuple(check_domain_inequalities(geom, (n_lo, n_hi)))
    separation_rows: list[InequalityRow] = []
    for idx, n in enumerate(ns):
        for row in strip_separation_check(geom, n):
            # The window-independent rows repeat identically at each n;
            # keep a single copy.
            if row.n is None and idx > 0:
                continue
            separation_rows.append(row)

    nu_v: float | None = None
    contraction_error: str | None = None
    try:
        nu_v = derive_contraction(config.cone_params()).nu_v
    except ValueError as exc:
        contraction_error = str(exc)

    with ThreadPoolExecutor(max_workers=max_workers(len(ns))) as pool:
        steps = tuple(
            pool.map(lambda n: _run_step(config, geom, seq, nu_v, n), ns)
        )

    a_values = [float(geom.a(n)) for n in ns]
    min_idx = int(min(range(len(ns)), key=lambda i: a_values[i]))

    failures: list[str] = []
    for row in domain_rows + tuple(separation_rows):
        if not row.passed:
            where = "all n" if row.n is None else f"n={row.n}"
            failures.append(
                f"inequality {row.check} at {where}: "
                f"lhs={format_real(row.lhs)} rhs={format_real(row.rhs)} "
                f"margin={format_real(row.margin)}"
            )
    if contraction_error is not None:
        failures.append(f"contraction bound: {contraction_error}")
    for step in steps:
        if step.error is not None:
            failures.append(f"step n={step.n}: {step.error}")
            continue
        if not step.a1.passed:
            failures.append(f"strip mapping (A1) failed at n={step.n}")
        if not step.cone.passed:
            failures.append(
                f"cone sweep (A3) failed at n={step.n}: "
                f"worst margin {format_real(step.cone.worst_sector_margin)}, "
                f"worst ratio {format_real(step.cone.worst_expansion_ratio)}"
            )
        if not step.cone.analytic_ok:
            failures.append(
                f"sector threshold failed at n={step.n}: "
                f"min |y| {format_real(step.cone.analytic_min_abs_y)} <= "
                f"threshold {format_real(step.cone.threshold_y)} "
                f"(or the |x| counterpart)"
            )
        if not step.contraction_ok:
            failures.append(
                f"measured contraction {format_real(step.contraction_ratio)} "
                f"exceeds nu_v at n={step.n}"
            )

    overall = not failures
    return VerificationReport(
        config=config,
        domain_rows=domain_rows,
        separation_rows=tuple(separation_rows),
        steps=steps,
        nu_v=nu_v,
        contraction_error=contraction_error,
        min_a=a_values[min_idx],
        min_a_arg=ns[min_idx],
        failures=tuple(failures),
        overall_pass=overall,
    )


INEQUALITY_HEADER = ["n", "check", "lhs", "rhs", "margin", "pass"]

STEP_HEADER = [
    "n",
    "a1_pass",
    "worst_sector_margin",
    "worst_expansion_ratio",
    "analytic_min_abs_y",
    "analytic_min_abs_x",
    "t11",
    "t12",
    "t21",
    "t22",
    "contraction_ratio",
    "error",
    "pass",
]


def _step_row(step: StepResult) -> list:
    cone = step.cone
    matrix = step.matrix or ((None, None), (None, None))
    return [
        step.n,
        None if step.a1 is None else step.a1.passed,
        None if cone is None else cone.worst_sector_margin,
        None if cone is None else cone.worst_expansion_ratio,
        None if cone is None else cone.analytic_min_abs_y,
        None if cone is None else cone.analytic_min_abs_x,
        matrix[0][0],
        matrix[0][1],
        matrix[1][0],
        matrix[1][1],
        step.contraction_ratio,
        step.error,
        step.passed,
    ]


def write_verification_outputs(report: VerificationReport, out_dir: str) -> list[str]:
    """Write the configured report files; returns the paths written."""
    os.makedirs(out_dir, exist_ok=True)
    formats = report.config.formats
    written: list[str] = []

    if "csv" in formats:
        path = os.path.join(out_dir, "inequalities.csv")
        rows = [r.as_csv_row() for r in report.domain_rows + report.separation_rows]
        write_csv(path, INEQUALITY_HEADER, rows)
        written.append(path)

        path = os.path.join(out_dir, "steps.csv")
        write_csv(path, STEP_HEADER, [_step_row(s) for s in report.steps])
        written.append(path)

    if "json" in formats:
        path = os.path.join(out_dir, "cones.json")
        write_json(path, [s.cone.to_json() for s in report.steps if s.cone])
        written.append(path)

        path = os.path.join(out_dir, "summary.json")
        write_json(path, report.summary_dict())
        written.append(path)

    if "svg" in formats:
        from . import figures

        path = os.path.join(out_dir, "margins_vs_n.svg")
        figures.save_margins_figure(report, path)
        written.append(path)

    return written
