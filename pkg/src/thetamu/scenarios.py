"""Scenario configuration, orchestration, and deterministic report emission.

A scenario bundles one polarized abelian variety, one level n, and the
checks to run on it.  ``run_scenario`` executes
validate -> bound -> mu_n -> blocks -> verdict -> ITT and serializes every
outcome (including errors) into a :class:`Report`.

Reports are deterministic: identical configs produce byte-identical JSON.
Wall-clock timings are therefore carried on the report object and shown in
the table format only, never in the JSON form.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from . import mult
from .errors import ThetamuError, ValidationError
from .mult import Verdict, gamma_blocks, spanning_check, surjectivity_verdict, wirtinger_matrix
from .torsion import DEFAULT_GROUP_CAP
from .varieties import (
    BoundPrediction,
    PeriodMatrix,
    PolarizedAbelianVariety,
    bound_prediction,
    torelli_bound,
    validate_polarized,
)

_SCENARIO_KEYS = {
    "name", "g", "type", "omega", "n", "eps", "seed", "simple_asserted", "caps", "checks",
}
_CAP_KEYS = {"group_order", "mu_cells", "wirtinger_unknowns", "spanning_points"}
_CHECK_KEYS = {"wirtinger", "spanning_modulus"}

#: exit codes: CI-friendly
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INCONCLUSIVE = 3
EXIT_CONSISTENCY = 4


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """Deterministic description of one verification run.

    ``omega`` is either a nested list of [re, im] pairs or the mapping
    {"random": {"seed": <int>}}; ``n`` is an integer or the token "g-1",
    which resolves to max(g-1, 1) once g is known.
    """

    name: str
    g: int
    type: tuple[int, ...]
    omega: Any
    n: Any = "g-1"
    eps: float = 1e-12
    seed: int = 0
    simple_asserted: bool = False
    caps: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "g": self.g,
            "type": list(self.type),
            "omega": self.omega,
            "n": self.n,
            "eps": self.eps,
            "seed": self.seed,
            "simple_asserted": self.simple_asserted,
            "caps": dict(self.caps),
            "checks": dict(self.checks),
        }

    @staticmethod
    def from_dict(data: dict) -> "ScenarioConfig":
        unknown = set(data) - _SCENARIO_KEYS
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        for key in ("g", "type", "omega"):
            if key not in data:
                raise ValueError(f"scenario is missing required key '{key}'")
        caps = dict(data.get("caps") or {})
        if set(caps) - _CAP_KEYS:
            raise ValueError(f"unknown cap keys: {sorted(set(caps) - _CAP_KEYS)}")
        checks = dict(data.get("checks") or {})
        if set(checks) - _CHECK_KEYS:
            raise ValueError(f"unknown check keys: {sorted(set(checks) - _CHECK_KEYS)}")
        return ScenarioConfig(
            name=str(data.get("name", "scenario")),
            g=int(data["g"]),
            type=tuple(int(d) for d in data["type"]),
            omega=data["omega"],
            n=data.get("n", "g-1"),
            eps=float(data.get("eps", 1e-12)),
            seed=int(data.get("seed", 0)),
            simple_asserted=bool(data.get("simple_asserted", False)),
            caps=caps,
            checks=checks,
        )


def load_scenario(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as handle:
        return ScenarioConfig.from_dict(json.load(handle))


def random_period_matrix(g: int, seed: int) -> PeriodMatrix:
    """Seeded matrix Omega = S + i (A^T A + g I) with S symmetric uniform in
    [-1/2, 1/2] and A uniform in [-1, 1]; always passes validation.

    Draw order is fixed (A first, then S) so the result is reproducible.
    """
    if g < 1:
        raise ValueError(f"require g >= 1, got {g}")
    rng = np.random.default_rng(int(seed))
    a = rng.uniform(-1.0, 1.0, (g, g))
    s0 = rng.uniform(-0.5, 0.5, (g, g))
    s = (s0 + s0.T) / 2.0
    return PeriodMatrix(s + 1j * (a.T @ a + g * np.eye(g)))


class ITTVerdict(Enum):
    HOLDS = "Holds"
    UNKNOWN = "Unknown"


def itt_verdict(pav: PolarizedAbelianVariety, n: int, verdict: Verdict) -> ITTVerdict:
    """Infinitesimal-Torelli implication: Holds iff n = g-1 and mu_n was
    verified surjective.  The implication needs only ampleness, so the
    simplicity assertion is reported separately, and failure of the
    hypothesis yields Unknown, never a negative verdict.
    """
    if n == pav.g - 1 and verdict is Verdict.SURJECTIVE:
        return ITTVerdict.HOLDS
    return ITTVerdict.UNKNOWN


def resolve_n(config: ScenarioConfig) -> tuple[int, str | None]:
    """Resolve the "g-1" token (minimum n is 1; degenerate for g = 1)."""
    if isinstance(config.n, str):
        if config.n != "g-1":
            raise ValueError(f"n must be an integer or 'g-1', got {config.n!r}")
        if config.g == 1:
            return 1, "n token 'g-1' resolved to 1 for g = 1 (ITT implication degenerates)"
        return config.g - 1, None
    n = int(config.n)
    if n < 1:
        raise ValueError(f"require n >= 1, got {n}")
    return n, None


def _complex_matrix_to_pairs(matrix: np.ndarray) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in matrix]


def _pairs_to_matrix(entries) -> np.ndarray:
    return np.array(
        [[complex(float(p[0]), float(p[1])) for p in row] for row in entries]
    )


def resolve_omega(config: ScenarioConfig) -> PeriodMatrix:
    if isinstance(config.omega, dict):
        request = config.omega.get("random")
        if request is None or set(config.omega) != {"random"}:
            raise ValueError("omega mapping must be exactly {'random': {'seed': <int>}}")
        return random_period_matrix(config.g, int(request.get("seed", config.seed)))
    return PeriodMatrix(_pairs_to_matrix(config.omega))


@dataclass(eq=False)
class Report:
    """Payload (deterministic) plus wall-clock timings (table only)."""

    payload: dict
    timings: dict[str, float]

    @property
    def exit_code(self) -> int:
        return int(self.payload["exit_code"])


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    def run(self, name, fn):
        start = time.perf_counter()
        try:
            return fn()
        finally:
            self.timings[name] = time.perf_counter() - start


def _verdict_payload(v: mult.SurjectivityVerdict) -> dict:
    return {
        "verdict": v.verdict.value,
        "rank": v.rank,
        "required_rank": v.required_rank,
        "gap_ratio": v.gap_ratio,
        "clean_gap": v.clean_gap,
        "dimensional_shortcut": v.dimensional_shortcut,
        "singular_values": list(v.singular_values),
        "cond": v.cond,
        "max_column_residual": v.max_residual,
        "seed": v.seed,
    }


def run_scenario(config: ScenarioConfig) -> Report:
    """Execute the full pipeline for one scenario; never raises for scenario
    content problems, which are serialized into the report instead."""
    timer = _Timer()
    notes: list[str] = []
    errors: list[str] = []
    payload: dict = {
        "scenario": config.to_dict(),
        "notes": notes,
        "errors": errors,
    }

    try:
        omega = resolve_omega(config)
        n, note = resolve_n(config)
        if note:
            notes.append(note)
        pav = timer.run(
            "validate",
            lambda: validate_polarized(omega, config.type, config.simple_asserted, config.eps),
        )
    except (ValidationError, ValueError) as err:
        if isinstance(err, ValidationError):
            errors.extend(str(v) for v in err.violations)
        else:
            errors.append(str(err))
        payload["exit_code"] = EXIT_VALIDATION
        return Report(payload, timer.timings)

    payload["resolved"] = {
        "omega": _complex_matrix_to_pairs(pav.matrix),
        "n": n,
    }
    payload["simple_asserted"] = pav.simple_asserted
    payload["h0"] = {
        "level_1": pav.h0(1),
        f"level_{n}": pav.h0(n),
        f"level_{n + 1}": pav.h0(n + 1),
    }
    bound = torelli_bound(pav.g, n)
    prediction = bound_prediction(pav, n)
    payload["bound"] = {
        "exact": str(bound.value),
        "decimal": float(bound.value),
        "least_sufficient": bound.least_sufficient,
    }
    payload["bound_prediction"] = prediction.value

    caps = config.caps
    exit_code = EXIT_OK
    verdict_obj = None
    try:
        verdict_obj = timer.run(
            "mu_verdict",
            lambda: surjectivity_verdict(
                pav, n, config.seed,
                cell_cap=int(caps.get("mu_cells", mult.DEFAULT_CELL_CAP)),
            ),
        )
        payload["surjectivity"] = _verdict_payload(verdict_obj)
        if verdict_obj.verdict is Verdict.INCONCLUSIVE:
            exit_code = EXIT_INCONCLUSIVE
    except ThetamuError as err:
        errors.append(f"mu_verdict: {err}")
        payload["surjectivity"] = None
        exit_code = EXIT_INCONCLUSIVE

    payload["blocks"] = None
    if verdict_obj is not None and not verdict_obj.dimensional_shortcut:
        if pav.delta.degree > int(caps.get("group_order", DEFAULT_GROUP_CAP)):
            notes.append("block decomposition skipped: group order over cap")
        else:
            try:
                blocks = timer.run("blocks", lambda: gamma_blocks(pav, n, config.seed))
                payload["blocks"] = {
                    "count": len(blocks.blocks),
                    "row_dim": (n + 1) ** pav.g,
                    "off_block_mass": blocks.off_block_mass,
                    "ranks": [b.rank for b in blocks.blocks],
                    "rank_sum": blocks.rank_sum,
                    "total_rank": blocks.total_rank,
                }
            except ThetamuError as err:
                errors.append(f"blocks: {err}")
                exit_code = max(exit_code, EXIT_INCONCLUSIVE)
    elif verdict_obj is not None and verdict_obj.dimensional_shortcut:
        notes.append("block decomposition skipped: dimensional obstruction shortcut")

    verdict_value = verdict_obj.verdict if verdict_obj is not None else Verdict.INCONCLUSIVE
    itt = itt_verdict(pav, n, verdict_value)
    payload["itt"] = {
        "verdict": itt.value,
        "applicable": n == pav.g - 1,
    }
    if n != pav.g - 1:
        reason = (
            "hypersurfaces are point sets for g = 1"
            if pav.g == 1
            else f"scenario has n = {n}"
        )
        notes.append(f"ITT implication needs n = g-1 = {pav.g - 1}; {reason}")
    # a violation needs a computed verdict that contradicts the prediction;
    # an errored verdict stage is a numeric failure, not a counterexample
    violation = (
        verdict_obj is not None
        and prediction is BoundPrediction.THEOREM_PREDICTS_SURJECTIVE
        and verdict_value is not Verdict.SURJECTIVE
    )
    payload["consistency"] = {"theorem_violation": violation}
    if violation:
        exit_code = EXIT_CONSISTENCY

    payload["wirtinger"] = None
    if config.checks.get("wirtinger"):
        try:
            payload["wirtinger"] = timer.run(
                "wirtinger", lambda: _wirtinger_payload(pav, n, config)
            )
        except (ThetamuError, ValueError) as err:
            errors.append(f"wirtinger: {err}")
            exit_code = max(exit_code, EXIT_INCONCLUSIVE)

    payload["spanning"] = None
    modulus = config.checks.get("spanning_modulus")
    if modulus:
        try:
            span = timer.run(
                "spanning",
                lambda: spanning_check(
                    pav, n, int(modulus),
                    point_cap=int(caps.get("spanning_points", mult.DEFAULT_POINT_CAP)),
                ),
            )
            payload["spanning"] = {
                "modulus": int(modulus),
                "npoints": span.npoints,
                "rank": span.rank,
                "required_rank": span.required_rank,
            }
        except (ThetamuError, ValueError) as err:
            errors.append(f"spanning: {err}")
            exit_code = max(exit_code, EXIT_INCONCLUSIVE)

    payload["exit_code"] = exit_code
    return Report(payload, timer.timings)


def _wirtinger_payload(pav: PolarizedAbelianVariety, n: int, config: ScenarioConfig) -> dict:
    wirt = wirtinger_matrix(
        pav, n, config.seed,
        unknown_cap=int(config.caps.get("wirtinger_unknowns", mult.DEFAULT_UNKNOWN_CAP)),
    )
    svals = np.linalg.svd(wirt.reduced, compute_uv=False)
    rng = np.random.default_rng(config.seed + 17)
    residuals = []
    for _ in range(3):
        b = rng.random(pav.g) @ pav.matrix.T + rng.random(pav.g)
        residuals.append(mult.diagram_check(pav, n, b, config.seed, wirt=wirt))
    return {
        "fit_residual": wirt.fit_residual,
        "relation_residual": wirt.relation_residual,
        "reduced_sigma_min_ratio": float(svals[-1] / svals[0]),
        "diagram_residual_max": float(max(residuals)),
    }


def _format_float(value: float) -> str:
    if value != value:
        return '"nan"'
    if value in (float("inf"), float("-inf")):
        return '"inf"' if value > 0 else '"-inf"'
    text = format(float(value), ".17g")
    # keep the token a JSON number
    return text if any(ch in text for ch in ".eE") else text + ".0"


def _serialize(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {_serialize(value[k], indent + 1)}"
            for k in sorted(value, key=str)
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        parts = [f"{inner}{_serialize(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, complex):
        return _serialize([value.real, value.imag], indent)
    if isinstance(value, Fraction):
        return json.dumps(str(value))
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {type(value)!r}")


def report_json(report: Report) -> str:
    """Stable-key-ordered JSON; floats carry 17 significant digits."""
    return _serialize(report.payload, 0) + "\n"


def _table_lines(value, prefix: str, out: list[str]) -> None:
    if isinstance(value, dict):
        for k in sorted(value, key=str):
            _table_lines(value[k], f"{prefix}{k}.", out)
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], (dict, list, tuple)):
        for i, v in enumerate(value):
            _table_lines(v, f"{prefix}{i}.", out)
    else:
        if isinstance(value, (list, tuple)):
            text = ", ".join(_plain(v) for v in value)
        else:
            text = _plain(value)
        out.append(f"{prefix[:-1]:<42} {text}")


def _plain(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".6g")
    return str(value)


def report_table(report: Report) -> str:
    lines: list[str] = []
    _table_lines(report.payload, "", lines)
    for name in sorted(report.timings):
        lines.append(f"{'time.' + name:<42} {report.timings[name]:.3f} s")
    return "\n".join(lines) + "\n"


def emit_report(report: Report, format: str = "json") -> str:
    """Render a report: 'json' is machine-stable, 'table' is for humans."""
    if format == "json":
        return report_json(report)
    if format == "table":
        return report_table(report)
    raise ValueError(f"unknown report format {format!r}")


def catalog() -> list[ScenarioConfig]:
    """Built-in named scenarios covering the instance checks of the suite."""
    rnd = lambda seed: {"random": {"seed": seed}}
    return [
        ScenarioConfig(
            name="elliptic-d3", g=1, type=(3,), omega=rnd(101), n=1,
            seed=11, simple_asserted=True,
        ),
        ScenarioConfig(
            name="elliptic-d4", g=1, type=(4,), omega=rnd(102), n=1,
            seed=12, simple_asserted=True,
        ),
        ScenarioConfig(
            name="surface-principal-dimcount", g=2, type=(1, 1), omega=rnd(103), n=1,
            seed=13, simple_asserted=True,
        ),
        ScenarioConfig(
            name="surface-33", g=2, type=(3, 3), omega=rnd(104), n="g-1",
            seed=14, simple_asserted=True,
        ),
        ScenarioConfig(
            name="wirtinger-g1-n1", g=1, type=(1,), omega=rnd(105), n=1,
            seed=15, simple_asserted=True, checks={"wirtinger": True},
        ),
        ScenarioConfig(
            name="wirtinger-g1-n2", g=1, type=(1,), omega=rnd(106), n=2,
            seed=16, simple_asserted=True, checks={"wirtinger": True},
        ),
        ScenarioConfig(
            name="wirtinger-g2-n1", g=2, type=(1, 1), omega=rnd(107), n=1,
            seed=17, simple_asserted=True, checks={"wirtinger": True},
        ),
        ScenarioConfig(
            name="spanning-g1-n2", g=1, type=(1,), omega=rnd(108), n=2,
            seed=18, simple_asserted=True, checks={"spanning_modulus": 10},
        ),
        ScenarioConfig(
            name="spanning-g2-n1", g=2, type=(1, 1), omega=rnd(109), n=1,
            seed=19, simple_asserted=True, checks={"spanning_modulus": 7},
        ),
    ]
