"""Residual certification of metric models.

Every check reduces to a per-node residual curve; verdicts take sup-norms
over the interior nodes (the two outermost nodes use one-sided stencils and
are reported separately, not judged).  ζ' in the radial-curvature check is
the analytic derivative stored on each block — third-order finite
differencing would drown the identity in stencil noise at tight tolerances.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from staticgeo.errors import ParameterError
from staticgeo.geometry import RADIAL, MetricModel, distinct_tolerance


@dataclass(frozen=True)
class Thresholds:
    static: float = 1e-6
    codazzi: float = 1e-6
    radial: float = 1e-6
    trace: float = 1e-8
    drift: float = 1e-8
    distinct_max: int = 3

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "Thresholds":
        """Default thresholds, rescaled by STATICGEO_TOL when set.

        The base value replaces the 1e-6 tier; the tighter trace/drift tier
        follows at base/100.
        """
        env = os.environ if environ is None else environ
        raw = env.get("STATICGEO_TOL")
        if raw is None:
            return cls()
        try:
            base = float(raw)
        except ValueError:
            raise ParameterError(f"STATICGEO_TOL must be a number, got {raw!r}") from None
        if base <= 0:
            raise ParameterError(f"STATICGEO_TOL must be positive, got {base}")
        return cls(static=base, codazzi=base, radial=base, trace=base * 1e-2, drift=base * 1e-2)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    threshold: float
    passed: bool
    endpoint: float | None = None


@dataclass(frozen=True)
class ResidualReport:
    case: str
    n: int
    R: float
    step: float
    s_range: tuple[float, float]
    truncated: bool
    checks: tuple[CheckResult, ...]
    distinct_count_max: int
    curves: dict[str, np.ndarray] = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [
            f"case = {self.case}",
            f"n = {self.n}",
            f"R = {self.R:.17g}",
            f"step = {self.step:.17g}",
            f"range = [{self.s_range[0]:.17g}, {self.s_range[1]:.17g}]",
            f"truncated = {self.truncated}",
        ]
        for c in self.checks:
            verdict = "PASS" if c.passed else "FAIL"
            extra = "" if c.endpoint is None else f", endpoints {c.endpoint:.3e}"
            lines.append(
                f"{c.name} = {c.residual:.6e} (threshold {c.threshold:.3e}{extra}) {verdict}"
            )
        lines.append(f"overall = {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_csv_rows(self) -> list[dict[str, object]]:
        rows = []
        for c in self.checks:
            rows.append(
                {
                    "case": self.case,
                    "check": c.name,
                    "residual": c.residual,
                    "threshold": c.threshold,
                    "endpoint": "" if c.endpoint is None else c.endpoint,
                    "passed": c.passed,
                }
            )
        return rows


def _sup_split(curve: np.ndarray) -> tuple[float, float]:
    """(interior sup, endpoint sup); whole curve when too short to split."""
    if curve.size < 3:
        v = float(np.max(np.abs(curve)))
        return v, v
    return float(np.max(np.abs(curve[1:-1]))), float(
        max(abs(curve[0]), abs(curve[-1]))
    )


def _radial_block(model: MetricModel):
    for b in model.blocks:
        if b.provenance == RADIAL:
            return b
    raise ParameterError("model has no radial block")


def fd_derivative(values: np.ndarray, step: float) -> np.ndarray:
    """Centered first derivative, one-sided second-order at the endpoints."""
    g = np.empty_like(values)
    g[1:-1] = (values[2:] - values[:-2]) / (2 * step)
    g[0] = (-3 * values[0] + 4 * values[1] - values[2]) / (2 * step)
    g[-1] = (3 * values[-1] - 4 * values[-2] + values[-3]) / (2 * step)
    return g


def static_residual_curves(model: MetricModel) -> dict[str, np.ndarray]:
    """|f'' − f(λ₁ − R/(n−1))| and per-block |ζf' − f(λ − R/(n−1))|."""
    shift = model.R / (model.n - 1)
    f, f1, f2 = model.f, model.f1, model.f2
    curves = {"static_radial": np.abs(f2 - f * (_radial_block(model).lam - shift))}
    for b in model.blocks:
        if b.provenance == RADIAL:
            continue
        curves[f"static_tangential[{b.label}]"] = np.abs(b.zeta * f1 - f * (b.lam - shift))
    return curves


def codazzi_residual_curves(model: MetricModel) -> dict[str, np.ndarray]:
    """Per-block |λ' + ζ(λ − λ₁)| with λ' by finite differences."""
    step = model.profile.step
    lam1 = _radial_block(model).lam
    curves = {}
    for b in model.blocks:
        if b.provenance == RADIAL:
            continue
        lam_prime = fd_derivative(b.lam, step)
        curves[f"codazzi[{b.label}]"] = np.abs(lam_prime + b.zeta * (b.lam - lam1))
    return curves


def radial_curvature_curves(model: MetricModel) -> dict[str, np.ndarray]:
    """Per-block |(−ζ' − ζ²) − (−λ + R/(n−1))| with the analytic ζ'."""
    shift = model.R / (model.n - 1)
    curves = {}
    for b in model.blocks:
        if b.provenance == RADIAL:
            continue
        lhs = -b.zeta_prime - b.zeta**2
        curves[f"radial_curvature[{b.label}]"] = np.abs(lhs - (-b.lam + shift))
    return curves


def trace_curve(model: MetricModel) -> np.ndarray:
    total = sum(b.multiplicity * b.lam for b in model.blocks)
    return np.abs(total - model.R)


def count_distinct(spectrum: Iterable[Sequence[float]], tol: float) -> int:
    """Max over nodes of the single-linkage cluster count at gap `tol`."""
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    worst = 0
    for values in spectrum:
        vals = np.sort(np.asarray(values, dtype=float))
        if vals.size == 0:
            continue
        clusters = 1 + int(np.count_nonzero(np.diff(vals) > tol))
        worst = max(worst, clusters)
    return worst


def verify(model: MetricModel, thresholds: Thresholds | None = None) -> ResidualReport:
    """Run the complete residual suite and aggregate verdicts."""
    t = thresholds or Thresholds()
    curves: dict[str, np.ndarray] = {}
    curves.update(static_residual_curves(model))
    curves.update(codazzi_residual_curves(model))
    curves.update(radial_curvature_curves(model))
    curves["trace"] = trace_curve(model)

    checks: list[CheckResult] = []
    for name, curve in curves.items():
        if name.startswith("static"):
            threshold = t.static
        elif name.startswith("codazzi"):
            threshold = t.codazzi
        elif name.startswith("radial_curvature"):
            threshold = t.radial
        else:
            threshold = t.trace
        interior, ends = _sup_split(curve)
        checks.append(CheckResult(name, interior, threshold, interior <= threshold, ends))

    drift = model.profile.drift
    checks.append(CheckResult("first_integral_drift", drift, t.drift, drift <= t.drift))

    lams = np.column_stack([b.lam for b in model.blocks])
    expanded = np.repeat(lams, [b.multiplicity for b in model.blocks], axis=1)
    tol = distinct_tolerance(expanded)
    worst = count_distinct(expanded, tol)
    checks.append(
        CheckResult("distinct_count", float(worst), float(t.distinct_max), worst <= t.distinct_max)
    )

    return ResidualReport(
        case=model.case,
        n=model.n,
        R=model.R,
        step=model.profile.step,
        s_range=model.profile.reached,
        truncated=model.profile.truncated,
        checks=tuple(checks),
        distinct_count_max=worst,
        curves=curves,
    )
