"""Experiment grid, result tables and regression against golden data.

The default grid is 7 restitution coefficients x 7 wedge angles x 7
initial directions.  Case ``i.j.l`` uses the i-th coefficient, the j-th
angle and the l-th direction (all 1-based).  Initial directions are
symbolic in ``k = tan(alpha)`` and normalized to unit length.
"""
from __future__ import annotations

import ast
import csv
import io
import json
import operator
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import DomainError
from .geometry import Corner, VelocityXY, make_corner, normalized, parse_angle
from .solvers import RunConfig, RunResult, StopReason, run_grid
from .zones import Zone

__all__ = [
    "V0Spec",
    "GridSpec",
    "GridCase",
    "TableRow",
    "ToleranceSpec",
    "RowVerdict",
    "ComparisonReport",
    "default_grid",
    "load_grid",
    "expand_grid",
    "run_cases",
    "emit_table",
    "parse_table",
    "load_golden",
    "compare_golden",
    "CSV_HEADER",
]

CSV_HEADER = ("case_id", "x0", "y0", "xf", "yf", "norm_f", "zone0", "steps", "stop")

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _compile_expr(text: str) -> Callable[[float], float]:
    """Compile an arithmetic expression in ``k`` (numbers, + - * /, parens)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError:
        raise DomainError(f"cannot parse velocity expression {text!r}") from None

    def ev(node, k):
        if isinstance(node, ast.Expression):
            return ev(node.body, k)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "k":
            return k
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left, k), ev(node.right, k))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            val = ev(node.operand, k)
            return -val if isinstance(node.op, ast.USub) else val
        raise DomainError(f"unsupported term in velocity expression {text!r}")

    try:
        ev(tree, 1.0)  # fail early on unsupported terms
    except ZeroDivisionError:
        pass
    return lambda k: ev(tree, k)


@dataclass(frozen=True)
class V0Spec:
    """Symbolic initial direction such as ``"(1, k/3)"``."""

    label: str
    fx: Callable[[float], float] = field(compare=False, repr=False)
    fy: Callable[[float], float] = field(compare=False, repr=False)

    @classmethod
    def parse(cls, text: str) -> "V0Spec":
        body = text.strip()
        if body.startswith("(") and body.endswith(")"):
            body = body[1:-1]
        parts = body.split(",")
        if len(parts) != 2:
            raise DomainError(f"initial velocity must have two components: {text!r}")
        return cls(text.strip(), _compile_expr(parts[0]), _compile_expr(parts[1]))

    def resolve(self, k: float) -> VelocityXY:
        try:
            raw = VelocityXY(self.fx(k), self.fy(k))
        except ZeroDivisionError:
            raise DomainError(f"{self.label} is undefined at k={k!r}") from None
        return normalized(raw)


_DEFAULT_EPS = (1.0, 0.95, 0.75, 0.5, 0.25, 0.05, 0.0)
_DEFAULT_ALPHA = ("pi/4", "pi/6", "pi/8", "pi/12", "pi/16", "pi/32", "pi/64")
_DEFAULT_V0 = ("(1, 0)", "(1, k/3)", "(1, 2*k/3)", "(1, k)", "(1, 1/k)", "(0, 1)", "(-1, k)")


@dataclass(frozen=True)
class GridSpec:
    eps_values: tuple[float, ...]
    alpha_values: tuple[str, ...]
    v0_specs: tuple[V0Spec, ...]

    def __post_init__(self):
        if not (self.eps_values and self.alpha_values and self.v0_specs):
            raise DomainError("grid must have at least one value along every axis")


def default_grid() -> GridSpec:
    return GridSpec(_DEFAULT_EPS, _DEFAULT_ALPHA, tuple(V0Spec.parse(s) for s in _DEFAULT_V0))


def load_grid(path: str | Path) -> GridSpec:
    """Read a JSON grid ``{"eps": [...], "alpha": [...], "v0": [...]}``.

    Missing keys fall back to the default grid's axis; angles may be
    ``"pi/N"`` strings or numbers of radians.
    """
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read grid file {str(path)!r}: {exc}") from exc
    base = default_grid()
    eps = tuple(float(e) for e in data.get("eps", base.eps_values))
    alpha = tuple(str(a) for a in data.get("alpha", base.alpha_values))
    v0 = tuple(V0Spec.parse(s) for s in data["v0"]) if "v0" in data else base.v0_specs
    return GridSpec(eps, alpha, v0)


@dataclass(frozen=True)
class GridCase:
    case_id: str
    eps: float
    corner: Corner
    v0: VelocityXY


def expand_grid(spec: GridSpec) -> list[GridCase]:
    """All combinations, coefficient-major, then angle, then direction."""
    cases = []
    for i, eps in enumerate(spec.eps_values, 1):
        for j, alpha in enumerate(spec.alpha_values, 1):
            corner = make_corner(parse_angle(alpha))
            for l, v0 in enumerate(spec.v0_specs, 1):
                cases.append(GridCase(f"{i}.{j}.{l}", eps, corner, v0.resolve(corner.k)))
    return cases


@dataclass(frozen=True)
class TableRow:
    case_id: str
    v0: VelocityXY
    v_final: VelocityXY
    norm_final: float
    zone0: Zone
    steps: int
    stop: StopReason

    @classmethod
    def from_result(cls, case_id: str, result: RunResult) -> "TableRow":
        return cls(case_id, result.v0, result.v_final, result.norm_final,
                   result.zone0, result.steps, result.stop)

    def as_record(self) -> dict:
        return {
            "case_id": self.case_id,
            "x0": self.v0.vx,
            "y0": self.v0.vy,
            "xf": self.v_final.vx,
            "yf": self.v_final.vy,
            "norm_f": self.norm_final,
            "zone0": self.zone0.value,
            "steps": self.steps,
            "stop": self.stop.value,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "TableRow":
        try:
            return cls(
                str(rec["case_id"]),
                VelocityXY(float(rec["x0"]), float(rec["y0"])),
                VelocityXY(float(rec["xf"]), float(rec["yf"])),
                float(rec["norm_f"]),
                Zone(rec["zone0"]),
                int(rec["steps"]),
                StopReason(rec["stop"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise DomainError(f"malformed table record {rec!r}: {exc}") from exc


def run_cases(cases: Sequence[GridCase], cfg_defaults: RunConfig | None = None,
              workers: int | None = None) -> list[TableRow]:
    results = run_grid([(c.eps, c.corner.alpha, c.v0) for c in cases], cfg_defaults, workers)
    return [TableRow.from_result(c.case_id, r) for c, r in zip(cases, results)]


_MD_STOP = {StopReason.EXIT_ZONE: "Z0", StopReason.ALMOST_AT_REST: "‖·‖", StopReason.STEP_CAP: "Nmax"}


def emit_table(rows: Iterable[TableRow], format: str = "csv") -> str:
    """Render rows as ``csv`` (15 significant digits), ``md`` or ``json``."""
    rows = list(rows)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            rec = row.as_record()
            writer.writerow([
                rec[name] if not isinstance(rec[name], float) else f"{rec[name]:.15g}"
                for name in CSV_HEADER
            ])
        return buf.getvalue()
    if format in ("md", "markdown"):
        lines = [
            "| # | (x0, y0) | (xf, yf) | norm_f | Z(v0) | N | Stop |",
            "|---|---|---|---|---|---|---|",
        ]
        for r in rows:
            lines.append(
                f"| {r.case_id} | ({r.v0.vx:.3f}, {r.v0.vy:.3f}) "
                f"| ({r.v_final.vx:.2e}, {r.v_final.vy:.2e}) | {r.norm_final:.2e} "
                f"| {r.zone0.value} | {r.steps} | {_MD_STOP[r.stop]} |"
            )
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps([r.as_record() for r in rows], indent=1) + "\n"
    raise DomainError(f"unknown table format {format!r}")


def parse_table(text: str, format: str = "csv") -> list[TableRow]:
    """Inverse of :func:`emit_table` for the ``csv`` and ``json`` formats."""
    if format == "json":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"malformed JSON table: {exc}") from exc
        return [TableRow.from_record(rec) for rec in records]
    if format != "csv":
        raise DomainError(f"cannot parse table format {format!r}")
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise DomainError(f"unexpected CSV header {reader.fieldnames!r}")
    return [TableRow.from_record(rec) for rec in reader]


def load_golden(path: str | Path | None = None) -> list[TableRow]:
    """Read golden rows; the shipped table is used when `path` is None."""
    if path is None:
        text = resources.files("corner_impact").joinpath("data/golden_tables.csv").read_text("utf-8")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DomainError(f"cannot read golden file {str(path)!r}: {exc}") from exc
    return parse_table(text, "csv")


@dataclass(frozen=True)
class ToleranceSpec:
    """Tolerances for comparing against 3-significant-digit tables.

    Step counts are exact for rows that exit the corner and relative for
    rows that stop almost at rest, whose final norm must also not exceed
    `rest_norm_max`.
    """

    v_abs: float = 5e-3
    norm_abs: float = 5e-3
    step_rel: float = 0.02
    rest_norm_max: float = 2e-12


@dataclass(frozen=True)
class RowVerdict:
    case_id: str
    passed: bool
    failures: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComparisonReport:
    verdicts: tuple[RowVerdict, ...]
    tol: ToleranceSpec

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def failed(self) -> list[RowVerdict]:
        return [v for v in self.verdicts if not v.passed]

    def to_text(self) -> str:
        lines = [f"{v.case_id}: FAIL {'; '.join(v.failures)}" for v in self.failed]
        n_fail = len(self.failed)
        lines.append(f"{len(self.verdicts) - n_fail}/{len(self.verdicts)} rows pass"
                     + ("" if n_fail == 0 else f", {n_fail} fail"))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "passed": self.passed,
            "tolerances": asdict(self.tol),
            "rows": [{"case_id": v.case_id, "passed": v.passed, "failures": list(v.failures)}
                     for v in self.verdicts],
        }, indent=1) + "\n"


def _row_failures(p: TableRow, g: TableRow, tol: ToleranceSpec) -> list[str]:
    out = []
    for name, a, b in (("x0", p.v0.vx, g.v0.vx), ("y0", p.v0.vy, g.v0.vy),
                       ("xf", p.v_final.vx, g.v_final.vx), ("yf", p.v_final.vy, g.v_final.vy)):
        if not abs(a - b) <= tol.v_abs:
            out.append(f"{name} {a:.6g} vs {b:.6g}")
    if not abs(p.norm_final - g.norm_final) <= tol.norm_abs:
        out.append(f"norm_f {p.norm_final:.6g} vs {g.norm_final:.6g}")
    if p.zone0 != g.zone0:
        out.append(f"zone0 {p.zone0.value} vs {g.zone0.value}")
    if p.stop != g.stop:
        out.append(f"stop {p.stop.value} vs {g.stop.value}")
    if g.stop is StopReason.ALMOST_AT_REST:
        if not abs(p.steps - g.steps) <= tol.step_rel * g.steps:
            out.append(f"steps {p.steps} vs {g.steps} (rel tol {tol.step_rel:g})")
        if p.stop is StopReason.ALMOST_AT_REST and not p.norm_final <= tol.rest_norm_max:
            out.append(f"rest norm {p.norm_final:.3g} above {tol.rest_norm_max:g}")
    elif p.steps != g.steps:
        out.append(f"steps {p.steps} vs {g.steps}")
    return out


def compare_golden(produced: Sequence[TableRow], golden: Sequence[TableRow],
                   tol: ToleranceSpec | None = None) -> ComparisonReport:
    """Row-by-row verdicts; both sides must cover the same case ids."""
    tol = tol or ToleranceSpec()
    by_id = {r.case_id: r for r in golden}
    ids = [r.case_id for r in produced]
    if len(by_id) != len(golden) or len(set(ids)) != len(ids) or set(ids) != set(by_id):
        missing = sorted(set(by_id) - set(ids))
        extra = sorted(set(ids) - set(by_id))
        raise DomainError(f"case sets differ (missing {missing[:5]}, extra {extra[:5]})")
    verdicts = []
    for p in produced:
        fails = _row_failures(p, by_id[p.case_id], tol)
        verdicts.append(RowVerdict(p.case_id, not fails, tuple(fails)))
    return ComparisonReport(tuple(verdicts), tol)
