"""Probes for multi-class shape structures and the exact coefficient audit.

`multiclass_probe` builds the most general candidate model whose tangent
directions split into several distinct shape classes h'/(h + c_l), runs the
full residual suite on it, and appends obstruction checks that measure
whether the candidate can close up into an actual metric.  The internal
identities pass by construction (the eigenvalues are defined spectrally
from the profile), so any failure is carried by the obstruction rows:

* ``obstruction_fiber[C<l>]`` - each class must be able to absorb its
  curvature budget into a constant; the residual is the sup-norm deviation
  of that budget from the best constant, weighted by 1/(h + c_l)^2.  It is
  identically zero for a single class and bounded away from zero for
  generic multi-class shift lists.
* ``obstruction_trace`` (two or more classes only) - the scalar curvature
  of the literal product-of-warped-fibers metric built from the classes,
  compared against the target R.

`coefficient_audit` is the exact companion: it reproduces, in rational
arithmetic, the linear conditions that the partial-fraction expansion of
1/H forces on the shift list, and flags every class whose condition fails.
The audit is step-free, so it certifies obstructions independently of any
integration error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .errors import ParameterError, RegularityError
from .geometry import FLAT_FACTOR, F_PRIME_FLOOR, RADIAL, WARPED_FIBER, Block, MetricModel
from .profile import CASE_GENERAL, OdeSpec, _to_fraction, integrate
from .rational import Polynomial, RootFactorization, partial_fractions
from .verify import CheckResult, ResidualReport, Thresholds, _sup_split, verify

# Obstruction rows fail only when they exceed this multiple of the static
# pass threshold, so discretization noise can never masquerade as an
# obstruction certificate.
OBSTRUCTION_FACTOR = 100.0

SHIFT_BALANCE = "shift-balance"
LOG_TERM = "log-term"
TOP_POWER = "top-power"


def _require_monotone_h(h1: np.ndarray) -> None:
    # The radial eigenvalue of the probe is h'''/h' + R/(n-1); a grid where
    # h' vanishes or changes sign has left the regular set.
    if np.min(np.abs(h1)) < F_PRIME_FLOOR:
        raise RegularityError("not on regular set: h' vanishes on the grid")
    if np.min(h1) < 0.0 < np.max(h1):
        raise RegularityError("not on regular set: h' changes sign on the grid")


def probe_model(
    n: int,
    R: float,
    a: float,
    c_list,
    init: tuple[float, float],
    s_range: tuple[float, float],
    step: float,
) -> MetricModel:
    """Build the multi-class candidate model without judging it.

    The candidate assigns one tangent direction to each shift class and
    parks the remaining n-1-d directions in a zero-shape product factor,
    which is the weakest (hence hardest to obstruct) completion.
    """
    spec = OdeSpec(case=CASE_GENERAL, n=n, R=R, a=a, c_list=c_list)
    d = len(spec.c_list)
    filler = n - 1 - d
    if filler < 0:
        raise ParameterError(
            f"{d} shape classes do not fit in {n - 1} tangent directions"
        )

    samples = integrate(spec, init, s_range, step)
    _require_monotone_h(samples.h1)

    shift = R / (n - 1)
    blocks = [
        Block(
            label="radial",
            provenance=RADIAL,
            multiplicity=1,
            lam=samples.h3 / samples.h1 + shift,
            zeta=None,
            zeta_prime=None,
        )
    ]
    for l, c in enumerate(spec.c_list):
        phi = samples.h + float(c)
        zeta = samples.h1 / phi
        blocks.append(
            Block(
                label=f"C{l}",
                provenance=WARPED_FIBER,
                multiplicity=1,
                lam=samples.h2 / phi + shift,
                zeta=zeta,
                zeta_prime=samples.h2 / phi - zeta**2,
            )
        )
    if filler > 0:
        zero = np.zeros_like(samples.h)
        blocks.append(
            Block(
                label="P",
                provenance=FLAT_FACTOR,
                multiplicity=filler,
                lam=np.full_like(samples.h, shift),
                zeta=zero,
                zeta_prime=zero,
            )
        )

    return MetricModel(
        case=CASE_GENERAL, n=n, R=float(R), profile=samples, blocks=tuple(blocks)
    )


def probe_report(model: MetricModel, thresholds: Thresholds | None = None) -> ResidualReport:
    """Run the residual suite on a probe model and append obstruction rows."""
    th = thresholds if thresholds is not None else Thresholds()
    samples = model.profile
    spec = samples.spec
    n, R = model.n, model.R
    d = len(spec.c_list)
    filler = n - 1 - d
    shift = R / (n - 1)
    phis = [samples.h + float(c) for c in spec.c_list]
    zetas = [samples.h1 / phi for phi in phis]
    report = verify(model, th)

    obs_threshold = OBSTRUCTION_FACTOR * th.static
    obs_checks: list[CheckResult] = []
    obs_curves: dict[str, np.ndarray] = {}

    # Per-class fiber consistency.  Equating the spectral eigenvalue of a
    # class with the eigenvalue of a warped fiber leaves one free constant
    # (the fiber's curvature), so the class is consistent exactly when
    #   T_l = 2 h'' (h+c_l) + R (h+c_l)^2/(n-1) + h'(h+c_l) sum_{j!=l} h'/(h+c_j)
    # is constant in s.  Deviation from the best constant, scaled back by
    # (h+c_l)^2, is the residual.
    for l, phi in enumerate(phis):
        cross = np.zeros_like(samples.h)
        for j, phj in enumerate(phis):
            if j != l:
                cross = cross + samples.h1 / phj
        budget = (
            2.0 * samples.h2 * phi
            + R * phi**2 / (n - 1)
            + samples.h1 * phi * cross
        )
        best = 0.5 * (np.max(budget) + np.min(budget))
        curve = np.abs((budget - best) / phi**2)
        name = f"obstruction_fiber[C{l}]"
        interior, endpoint = _sup_split(curve)
        obs_checks.append(
            CheckResult(
                name=name,
                residual=interior,
                threshold=obs_threshold,
                passed=interior <= obs_threshold,
                endpoint=endpoint,
            )
        )
        obs_curves[name] = curve

    # Literal trace: scalar curvature of the product of one-dimensional
    # warped fibers plus the zero-shape factor.  Only meaningful for two or
    # more classes; with a single class the mult-1 candidate is a probe,
    # not the model itself, and this row would punish the probe's shape
    # rather than the shift list.
    if d >= 2:
        cross_sum = np.zeros_like(samples.h)
        for l in range(d):
            for j in range(d):
                if j != l:
                    cross_sum = cross_sum + zetas[l] * zetas[j]
        literal = (
            -2.0 * sum(samples.h2 / phi for phi in phis)
            - cross_sum
            + filler * shift
        )
        curve = np.abs(literal - R)
        interior, endpoint = _sup_split(curve)
        obs_checks.append(
            CheckResult(
                name="obstruction_trace",
                residual=interior,
                threshold=obs_threshold,
                passed=interior <= obs_threshold,
                endpoint=endpoint,
            )
        )
        obs_curves["obstruction_trace"] = curve

    return replace(
        report,
        checks=report.checks + tuple(obs_checks),
        curves={**report.curves, **obs_curves},
    )


def multiclass_probe(
    n: int,
    R: float,
    a: float,
    c_list,
    init: tuple[float, float],
    s_range: tuple[float, float],
    step: float,
    thresholds: Thresholds | None = None,
) -> ResidualReport:
    """Integrate the multi-class profile and report residuals + obstructions.

    The returned report contains the usual residual checks plus the
    obstruction rows; `obstruction_certificate` extracts the rows that
    certify failure.
    """
    return probe_report(probe_model(n, R, a, c_list, init, s_range, step), thresholds)


def obstruction_certificate(report: ResidualReport) -> tuple[str, ...]:
    """Names of the obstruction rows that certify failure (may be empty)."""
    return tuple(
        c.name
        for c in report.checks
        if c.name.startswith("obstruction") and not c.passed
    )


@dataclass(frozen=True)
class AuditRecord:
    """One exact condition evaluated for one shift class."""

    class_index: int
    shift: Fraction
    multiplicity: int
    condition: str  # SHIFT_BALANCE | LOG_TERM | TOP_POWER
    value: Fraction
    violated: bool


@dataclass(frozen=True)
class AuditReport:
    n: int
    R_is_zero: bool
    m: int
    alpha: Fraction
    records: tuple[AuditRecord, ...]

    @property
    def any_violation(self) -> bool:
        return any(r.violated for r in self.records)

    def to_csv_rows(self) -> list[dict[str, object]]:
        rows = []
        for r in self.records:
            rows.append(
                {
                    "class": r.class_index,
                    "shift": str(r.shift),
                    "multiplicity": r.multiplicity,
                    "condition": r.condition,
                    "value": str(r.value),
                    "violated": r.violated,
                }
            )
        return rows


def coefficient_audit(n: int, R, c_list, multiplicities) -> AuditReport:
    """Evaluate the exact per-class conditions on a shift list.

    With m = 1 + sum of multiplicities and alpha = sum n_l c_l (the
    second-highest coefficient of the expanded denominator), the nonzero-R
    branch requires c_l (m-1) = alpha for every class; distinct shifts can
    satisfy that for at most one class, so any genuine multi-class list is
    flagged.  The R = 0 branch works on the partial fractions of 1/H: a
    first-order coefficient at any class combined with m > 2 produces a log
    term that an affine first integral cannot contain, and a class of
    multiplicity >= 2 alongside another class forces the (never-vanishing)
    top coefficient to kill a factor 1/(1 - n_l) that is never zero.
    All arithmetic is in `fractions.Fraction`; no grid is involved.
    """
    shifts = tuple(_to_fraction(c) for c in c_list)
    mults = tuple(int(m) for m in multiplicities)
    if len(shifts) != len(mults):
        raise ParameterError(
            f"{len(shifts)} shifts but {len(mults)} multiplicities"
        )
    factorization = RootFactorization(zip(shifts, mults))

    d = len(shifts)
    m = 1 + sum(mults)
    alpha = sum((nl * c for c, nl in zip(shifts, mults)), Fraction(0))
    r_zero = R == 0

    records: list[AuditRecord] = []
    if not r_zero:
        for l, (c, nl) in enumerate(zip(shifts, mults)):
            value = c * (m - 1) - alpha
            records.append(
                AuditRecord(
                    class_index=l,
                    shift=c,
                    multiplicity=nl,
                    condition=SHIFT_BALANCE,
                    value=value,
                    violated=value != 0,
                )
            )
    else:
        pf = partial_fractions(Polynomial.one(), factorization)
        for l, (c, nl) in enumerate(zip(shifts, mults)):
            log_coeff = pf.first_order_coefficient(l)
            records.append(
                AuditRecord(
                    class_index=l,
                    shift=c,
                    multiplicity=nl,
                    condition=LOG_TERM,
                    value=log_coeff,
                    violated=log_coeff != 0 and m > 2,
                )
            )
            if nl >= 2 and d >= 2:
                value = 2 * pf.top_coefficient(l) / (1 - nl)
                records.append(
                    AuditRecord(
                        class_index=l,
                        shift=c,
                        multiplicity=nl,
                        condition=TOP_POWER,
                        value=value,
                        violated=value != 0,
                    )
                )

    return AuditReport(
        n=int(n),
        R_is_zero=bool(r_zero),
        m=m,
        alpha=alpha,
        records=tuple(records),
    )
