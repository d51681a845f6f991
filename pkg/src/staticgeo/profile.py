"""Radial profile ODEs: right-hand sides, fixed-step integration, first integrals.

Cases i/ii/general integrate the state (h, h'); cases iii/iv integrate
(f, f') directly and carry h along as the antiderivative of f (normalised to
h = 0 at the left endpoint).  In every case f is the derivative of h, and the
sample arrays alias rather than re-integrate: f = h', f' = h'', f'' = h'''.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from staticgeo.errors import (
    ParameterError,
    ProfileSingularityError,
    StepTooCoarseError,
)
from staticgeo.rational import PartialFractionExpansion, Polynomial, RootFactorization, partial_fractions

CASE_I = "thm1_i_warped_factor"
CASE_II = "thm1_ii"
CASE_III = "thm1_iii"
CASE_IV = "thm1_iv_factor"
CASE_GENERAL = "general_multiclass"

CASES = (CASE_I, CASE_II, CASE_III, CASE_IV, CASE_GENERAL)

#: Trajectories are truncated once any denominator factor gets this close to 0.
DELTA_MIN = 1e-3

#: Default ceiling on the finite-difference derivative of the first integral
#: along the returned grid; larger values mean the step cannot resolve the flow.
DRIFT_GUARD = 1e-6


def _to_fraction(value) -> Fraction:
    if isinstance(value, float):
        return Fraction(value)  # exact binary expansion
    return Fraction(value)


@dataclass(frozen=True)
class OdeSpec:
    """Which profile equation to solve, with its constants.

    ``k`` is used by cases i and iv, ``a`` by case ii and the general case,
    ``c2`` by case i when n−k ≥ 2, and ``c_list`` (pairwise-distinct shifts)
    by the general case only.
    """

    case: str
    n: int
    R: float = 0.0
    a: float | None = None
    k: int | None = None
    c2: float | None = None
    c_list: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.case not in CASES:
            raise ParameterError(f"unknown case tag {self.case!r}; expected one of {CASES}")
        if self.n < 3:
            raise ParameterError(f"n must be at least 3, got {self.n}")
        if self.case == CASE_I:
            if self.k is None or not 2 <= self.k <= self.n - 1:
                raise ParameterError(f"case i needs 2 <= k <= n-1, got k={self.k}, n={self.n}")
            if self.n - self.k == 1 and self.c2 not in (None, 0):
                raise ParameterError("case i with n-k=1 admits no c2 term")
        elif self.case == CASE_IV:
            if self.k is None or not 1 <= self.k <= self.n - 1:
                raise ParameterError(f"case iv needs 1 <= k <= n-1, got k={self.k}, n={self.n}")
        if self.case in (CASE_II, CASE_GENERAL):
            if self.a is None or self.a == 0:
                raise ParameterError("degenerate: a=0 forces f constant, which the static equation excludes")
        if self.case == CASE_GENERAL:
            if not self.c_list:
                raise ParameterError("general case needs a nonempty c_list")
            shifts = tuple(_to_fraction(c) for c in self.c_list)
            if len(set(shifts)) != len(shifts):
                raise ParameterError(f"c_list entries must be pairwise distinct, got {self.c_list}")
            object.__setattr__(self, "c_list", shifts)
        elif self.c_list is not None:
            object.__setattr__(self, "c_list", tuple(_to_fraction(c) for c in self.c_list))

    @property
    def kappa(self) -> float:
        """Oscillator constant for the linear cases iii and iv."""
        if self.case == CASE_III:
            return self.R / (self.n * (self.n - 1))
        if self.case == CASE_IV:
            return self.R / (self.k * (self.n - 1))
        raise ParameterError(f"kappa is defined for cases iii/iv only, not {self.case}")

    @property
    def linear_state(self) -> bool:
        return self.case in (CASE_III, CASE_IV)


@functools.lru_cache(maxsize=None)
def _general_tables(spec: OdeSpec):
    """Exact H, Q and the two partial-fraction expansions for the general case."""
    fac = RootFactorization([(c, 1) for c in spec.c_list])
    h_poly = fac.expand()
    q_poly = h_poly.antiderivative()
    pf_q_over_h = partial_fractions(q_poly, fac)
    pf_one_over_h = partial_fractions(Polynomial.one(), fac)
    h_coeffs = np.array([float(c) for c in h_poly.coefficients])
    q_coeffs = np.array([float(c) for c in q_poly.coefficients])
    dh_coeffs = np.array([float(c) for c in h_poly.derivative().coefficients])
    return fac, h_coeffs, q_coeffs, dh_coeffs, pf_q_over_h, pf_one_over_h


def _polyval(coeffs: np.ndarray, x):
    acc = 0.0 * x + (coeffs[-1] if coeffs.size else 0.0)
    for c in coeffs[-2::-1]:
        acc = acc * x + c
    return acc


def _check_factors(spec: OdeSpec, h) -> None:
    """Raise when h sits within DELTA_MIN of a vanishing denominator factor."""
    if spec.case == CASE_GENERAL:
        for c in spec.c_list:
            if np.min(np.abs(h + float(c))) < DELTA_MIN:
                if c == 0:
                    name = "h"
                elif c > 0:
                    name = f"h + {c}"
                else:
                    name = f"h - {-c}"
                raise ProfileSingularityError(
                    f"profile singularity: factor {name} within {DELTA_MIN:g} of zero"
                )
    elif spec.case == CASE_II or (spec.case == CASE_I and spec.c2 not in (None, 0) and spec.n - spec.k >= 2):
        if np.min(np.abs(h)) < DELTA_MIN:
            raise ProfileSingularityError(
                f"profile singularity: factor h within {DELTA_MIN:g} of zero"
            )


def rhs(spec: OdeSpec, state) -> float:
    """Second derivative of the profile at ``state``.

    ``state`` is (h, h') for cases i/ii/general and (f, f') for cases iii/iv.
    """
    y0 = state[0]
    if spec.linear_state:
        return -spec.kappa * y0
    _check_factors(spec, y0)
    n, R = spec.n, spec.R
    if spec.case == CASE_II:
        return -R * y0 / (n * (n - 1)) + spec.a * y0 ** (1 - n)
    if spec.case == CASE_I:
        out = -R * y0 / ((n - 1) * (n - spec.k + 1))
        if spec.c2 not in (None, 0) and n - spec.k >= 2:
            out += spec.c2 * y0 ** (spec.k - n)
        return out
    _, h_coeffs, q_coeffs, _, _, _ = _general_tables(spec)
    return (spec.a - R / (n - 1) * _polyval(q_coeffs, y0)) / _polyval(h_coeffs, y0)


def third_derivative(spec: OdeSpec, state) -> float:
    """d³/ds³ of the profile, by differentiating `rhs` analytically."""
    y0, y1 = state[0], state[1]
    n, R = spec.n, spec.R
    if spec.linear_state:
        return -spec.kappa * y1
    if spec.case == CASE_II:
        return y1 * (-R / (n * (n - 1)) + (1 - n) * spec.a * y0 ** (-n))
    if spec.case == CASE_I:
        out = -R / ((n - 1) * (n - spec.k + 1))
        if spec.c2 not in (None, 0) and n - spec.k >= 2:
            out += spec.c2 * (spec.k - n) * y0 ** (spec.k - n - 1)
        return y1 * out
    _, h_coeffs, _, dh_coeffs, _, _ = _general_tables(spec)
    h2 = rhs(spec, state)
    return y1 * (-R / (n - 1) - h2 * _polyval(dh_coeffs, y0) / _polyval(h_coeffs, y0))


def first_integral(spec: OdeSpec, node):
    """Conserved combination of (h, h') — or (f, f') for cases iii/iv."""
    y0, y1 = node[0], node[1]
    n, R = spec.n, spec.R
    if spec.linear_state:
        return y1**2 + spec.kappa * y0**2
    if spec.case == CASE_II:
        return y1**2 + R * y0**2 / (n * (n - 1)) + 2 * spec.a * y0 ** (2 - n) / (n - 2)
    if spec.case == CASE_I:
        quad = y1**2 + R * y0**2 / ((n - 1) * (n - spec.k + 1))
        if spec.n - spec.k == 1:
            return quad
        if spec.n - spec.k - 1 == 0:
            raise ParameterError("n-k-1 vanishes; the n-k>=2 form does not apply")
        if spec.c2 in (None, 0):
            return quad
        return quad + 2 * spec.c2 * y0 ** (spec.k - n + 1) / (n - spec.k - 1)
    _, _, _, _, pf_q, pf_one = _general_tables(spec)
    gamma = 2 * R / (n - 1)
    return y1**2 + gamma * pf_q.antiderivative_value(y0) - 2 * spec.a * pf_one.antiderivative_value(y0)


@dataclass(frozen=True)
class ProfileSamples:
    """Uniform-grid trajectory with all derivatives needed downstream.

    ``f``, ``f1`` and ``f2`` are views of ``h1``, ``h2`` and ``h3``: the
    potential's derivative *is* the static potential, by construction.
    """

    spec: OdeSpec
    s: np.ndarray
    h: np.ndarray
    h1: np.ndarray
    h2: np.ndarray
    h3: np.ndarray
    step: float
    requested: tuple[float, float]
    truncated: bool
    drift: float
    fi_values: np.ndarray = field(repr=False)

    @property
    def f(self) -> np.ndarray:
        return self.h1

    @property
    def f1(self) -> np.ndarray:
        return self.h2

    @property
    def f2(self) -> np.ndarray:
        return self.h3

    @property
    def reached(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    def __len__(self) -> int:
        return self.s.size


def _derivative_field(spec: OdeSpec):
    if spec.linear_state:
        kappa = spec.kappa

        def deriv(y):
            return np.array([y[1], y[2], -kappa * y[1]])

    else:

        def deriv(y):
            return np.array([y[1], rhs(spec, y)])

    return deriv


def integrate(
    spec: OdeSpec,
    init: Sequence[float],
    s_range: tuple[float, float],
    step: float,
    drift_guard: float | None = DRIFT_GUARD,
) -> ProfileSamples:
    """Classical 4th-order fixed-step integration over a uniform grid.

    ``init`` is (h0, h'0), or (f0, f'0) for the linear cases.  The grid is
    truncated — never continued — if any stage of a step lands within
    DELTA_MIN of a singular factor; the returned samples then cover the
    reached subinterval and ``truncated`` is set.  An initial condition
    already inside the guarded set raises instead.
    """
    s_min, s_max = float(s_range[0]), float(s_range[1])
    if not (math.isfinite(s_min) and math.isfinite(s_max)) or s_max <= s_min:
        raise ParameterError(f"need a finite range with s_min < s_max, got {s_range}")
    if step <= 0:
        raise ParameterError(f"step must be positive, got {step}")
    nsteps = math.floor((s_max - s_min) / step + 1e-9)
    if nsteps < 1:
        raise ParameterError(f"range {s_range} holds no full step of {step}")

    if spec.linear_state:
        y = np.array([0.0, float(init[0]), float(init[1])])
    else:
        y = np.array([float(init[0]), float(init[1])])
    deriv = _derivative_field(spec)
    try:
        deriv(y)
    except ProfileSingularityError as exc:
        raise ProfileSingularityError(f"initial condition inside singular set: {exc}") from None

    states = [y]
    truncated = False
    for i in range(nsteps):
        dt = step
        try:
            k1 = deriv(y)
            k2 = deriv(y + 0.5 * dt * k1)
            k3 = deriv(y + 0.5 * dt * k2)
            k4 = deriv(y + dt * k3)
            y_next = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            deriv(y_next)  # reject steps that land inside the guarded set
        except ProfileSingularityError:
            truncated = True
            break
        y = y_next
        states.append(y)

    count = len(states)
    arr = np.array(states)
    s = s_min + step * np.arange(count)
    if spec.linear_state:
        h, f, f1 = arr[:, 0], arr[:, 1], arr[:, 2]
        h1, h2, h3 = f, f1, -spec.kappa * f
        fi = first_integral(spec, (f, f1))
    else:
        h, h1 = arr[:, 0], arr[:, 1]
        h2 = np.array([rhs(spec, (hv, dv)) for hv, dv in zip(h, h1)])
        h3 = np.array([third_derivative(spec, (hv, dv)) for hv, dv in zip(h, h1)])
        fi = first_integral(spec, (h, h1))

    drift = float(np.max(np.abs(fi - fi[0]))) if count > 1 else 0.0
    # A truncated run is already flagged: its final wall-approach nodes are
    # under-resolved at any step, so the coarseness guard applies only to
    # runs that complete the requested interval.
    if drift_guard is not None and not truncated and count > 1:
        fd = np.abs(np.diff(fi)) / step
        scale = max(1.0, float(np.abs(fi[0])))
        if np.max(fd) > drift_guard * scale:
            raise StepTooCoarseError(
                "step too coarse: first integral drifts at rate "
                f"{np.max(fd):.3e} per unit length (guard {drift_guard:g})"
            )

    return ProfileSamples(
        spec=spec,
        s=s,
        h=np.asarray(h, dtype=float),
        h1=np.asarray(h1, dtype=float),
        h2=np.asarray(h2, dtype=float),
        h3=np.asarray(h3, dtype=float),
        step=step,
        requested=(s_min, s_max),
        truncated=truncated,
        drift=drift,
        fi_values=np.asarray(fi, dtype=float),
    )
