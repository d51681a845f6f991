"""Exact rational-function algebra used by the profile equations.

Polynomials are dense, univariate, with `fractions.Fraction` coefficients
stored in ascending order of degree.  Denominators of interest are products
of distinct linear factors (x + c) with multiplicities, so partial-fraction
expansions are computed by local power-series division around each root
(the residue/Taylor method) instead of solving a dense linear system.

The float-facing helper `log_affine_fit` least-squares fits samples of a
function against the basis {log|x + c_l|} + {1, x} and reports the sup-norm
misfit.  It is the numeric face of the fact that a finite combination of
such logarithms can only equal an affine function when every coefficient
vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DegenerateGridError

RationalLike = Fraction | int | str


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise TypeError("exact arithmetic only: got float %r" % value)
    return Fraction(value)


class Polynomial:
    """Univariate polynomial with exact rational coefficients.

    Coefficients are ascending: ``Polynomial([2, 0, 1])`` is ``x^2 + 2``.
    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self._coeffs = tuple(cs)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(())

    @classmethod
    def one(cls) -> "Polynomial":
        return cls((1,))

    @classmethod
    def variable(cls) -> "Polynomial":
        return cls((0, 1))

    def coefficient(self, power: int) -> Fraction:
        """Coefficient of x**power (zero beyond the stored degree)."""
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return Fraction(0)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self._coeffs, other._coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Polynomial(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(-c for c in self._coeffs)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if not self or not other:
                return Polynomial.zero()
            out = [Fraction(0)] * (len(self._coeffs) + len(other._coeffs) - 1)
            for i, a in enumerate(self._coeffs):
                if a == 0:
                    continue
                for j, b in enumerate(other._coeffs):
                    out[i + j] += a * b
            return Polynomial(out)
        scale = _as_fraction(other)
        return Polynomial(c * scale for c in self._coeffs)

    __rmul__ = __mul__

    def __call__(self, x):
        """Evaluate by Horner.  Fractions stay exact; floats/arrays go float."""
        if isinstance(x, Fraction) or isinstance(x, int):
            acc = Fraction(0)
            for c in reversed(self._coeffs):
                acc = acc * x + c
            return acc
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in reversed(self._coeffs):
            acc = acc * x + float(c)
        if np.ndim(x) == 0:
            return float(acc)
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial(i * c for i, c in enumerate(self._coeffs) if i > 0)

    def antiderivative(self) -> "Polynomial":
        """Antiderivative with zero constant term."""
        out = [Fraction(0)]
        out.extend(c / (i + 1) for i, c in enumerate(self._coeffs))
        return Polynomial(out)

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Exact long division: returns (quotient, remainder)."""
        if not divisor:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._coeffs)
        dcs = divisor._coeffs
        dn = len(dcs) - 1
        lead = dcs[-1]
        if len(rem) <= dn:
            return Polynomial.zero(), Polynomial(rem)
        q = [Fraction(0)] * (len(rem) - dn)
        for i in range(len(rem) - 1, dn - 1, -1):
            factor = rem[i] / lead
            if factor == 0:
                continue
            q[i - dn] = factor
            for j, c in enumerate(dcs):
                rem[i - dn + j] -= factor * c
        return Polynomial(q), Polynomial(rem[:dn])

    def taylor_shift(self, offset: RationalLike) -> "Polynomial":
        """Return the polynomial p(x + offset), exactly."""
        a = _as_fraction(offset)
        out: list[Fraction] = []
        for c in reversed(self._coeffs):
            # out <- out * (x + a) + c
            nxt = [Fraction(0)] * (len(out) + 1)
            for i, g in enumerate(out):
                nxt[i + 1] += g
                nxt[i] += g * a
            nxt[0] += c
            out = nxt
        return Polynomial(out)

    def __repr__(self) -> str:
        if not self._coeffs:
            return "Polynomial(0)"
        parts = []
        for i, c in enumerate(self._coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*x")
            else:
                parts.append(f"{c}*x^{i}")
        return "Polynomial(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class RootFactorization:
    """A monic product of distinct linear factors: prod_l (x + shift_l)**mult_l.

    Shifts must be pairwise distinct exact rationals; repeated shifts must be
    merged into a single entry with a higher multiplicity before construction.
    """

    factors: tuple[tuple[Fraction, int], ...]

    def __init__(self, factors: Iterable[tuple[RationalLike, int]]):
        fs = tuple((_as_fraction(c), int(m)) for c, m in factors)
        if not fs:
            raise ValueError("empty factorization")
        shifts = [c for c, _ in fs]
        if len(set(shifts)) != len(shifts):
            raise ValueError(
                "repeated shifts %r: merge duplicates into one factor with "
                "a higher multiplicity" % (sorted(str(s) for s in shifts),)
            )
        for c, m in fs:
            if m < 1:
                raise ValueError(f"multiplicity must be >= 1, got {m} for shift {c}")
        object.__setattr__(self, "factors", fs)

    @property
    def shifts(self) -> tuple[Fraction, ...]:
        return tuple(c for c, _ in self.factors)

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.factors)

    def expand(self) -> Polynomial:
        """Multiply the factors out into a dense polynomial."""
        out = Polynomial.one()
        for c, m in self.factors:
            lin = Polynomial((c, 1))
            for _ in range(m):
                out = out * lin
        return out

    def cofactor(self, index: int) -> Polynomial:
        """Product of all factors except the one at `index`."""
        out = Polynomial.one()
        for i, (c, m) in enumerate(self.factors):
            if i == index:
                continue
            lin = Polynomial((c, 1))
            for _ in range(m):
                out = out * lin
        return out


@dataclass(frozen=True)
class PartialFractionTerm:
    """One term coeff / (x + shift)**power of an expansion."""

    root_index: int
    shift: Fraction
    power: int
    coeff: Fraction


@dataclass(frozen=True)
class PartialFractionExpansion:
    """numerator/denominator == linear_coeff*x + const_coeff + sum of terms."""

    linear_coeff: Fraction
    const_coeff: Fraction
    terms: tuple[PartialFractionTerm, ...]

    def top_coefficient(self, root_index: int) -> Fraction:
        """Coefficient of the highest power attached to one root."""
        best = None
        for t in self.terms:
            if t.root_index == root_index and (best is None or t.power > best.power):
                best = t
        if best is None:
            return Fraction(0)
        return best.coeff

    def first_order_coefficient(self, root_index: int) -> Fraction:
        for t in self.terms:
            if t.root_index == root_index and t.power == 1:
                return t.coeff
        return Fraction(0)

    def __call__(self, x):
        """Evaluate exactly (Fraction input) or in floats (everything else)."""
        if isinstance(x, (Fraction, int)):
            acc = self.linear_coeff * x + self.const_coeff
            for t in self.terms:
                acc += t.coeff / (x + t.shift) ** t.power
            return acc
        xs = np.asarray(x, dtype=float)
        acc = float(self.linear_coeff) * xs + float(self.const_coeff)
        for t in self.terms:
            acc = acc + float(t.coeff) / (xs + float(t.shift)) ** t.power
        if np.ndim(x) == 0:
            return float(acc)
        return acc

    def antiderivative_value(self, x):
        """Float value of an antiderivative (log terms for first-order poles).

        The additive constant is whatever the closed form produces; callers
        that need a pinned base point should difference two evaluations on
        the same side of every pole.
        """
        xs = np.asarray(x, dtype=float)
        acc = 0.5 * float(self.linear_coeff) * xs**2 + float(self.const_coeff) * xs
        for t in self.terms:
            shifted = xs + float(t.shift)
            if t.power == 1:
                acc = acc + float(t.coeff) * np.log(np.abs(shifted))
            else:
                acc = acc + float(t.coeff) / ((1 - t.power) * shifted ** (t.power - 1))
        if np.ndim(x) == 0:
            return float(acc)
        return acc

    def recombine(self, denominator: RootFactorization) -> Polynomial:
        """Clear denominators: the exact numerator over `denominator`."""
        dpoly = denominator.expand()
        out = Polynomial((self.const_coeff, self.linear_coeff)) * dpoly
        for t in self.terms:
            partial = denominator.cofactor(t.root_index)
            lin = Polynomial((t.shift, 1))
            mult = dict(denominator.factors)[t.shift]
            for _ in range(mult - t.power):
                partial = partial * lin
            out = out + t.coeff * partial
        return out


def partial_fractions(
    numerator: Polynomial, denominator: RootFactorization
) -> PartialFractionExpansion:
    """Expand numerator/denominator over the distinct linear factors.

    The numerator degree may exceed the denominator degree by at most one,
    so the polynomial part is at most affine.  Coefficients attached to the
    root -shift_l are read off the exact Taylor expansion of
    remainder / cofactor_l around that root; the top coefficient for each
    root is automatically nonzero when the numerator does not vanish there.
    """
    dpoly = denominator.expand()
    if numerator.degree > dpoly.degree + 1:
        raise ValueError(
            f"numerator degree {numerator.degree} exceeds denominator degree "
            f"{dpoly.degree} + 1"
        )
    quotient, remainder = numerator.divmod(dpoly)
    terms: list[PartialFractionTerm] = []
    for index, (shift, mult) in enumerate(denominator.factors):
        cofac = denominator.cofactor(index)
        # Taylor-expand remainder/cofactor around x = -shift in u = x + shift.
        num_u = remainder.taylor_shift(-shift)
        den_u = cofac.taylor_shift(-shift)
        lead = den_u.coefficient(0)
        series: list[Fraction] = []
        for j in range(mult):
            val = num_u.coefficient(j)
            for i, g in enumerate(series):
                val -= g * den_u.coefficient(j - i)
            series.append(val / lead)
        for power in range(1, mult + 1):
            coeff = series[mult - power]
            if coeff != 0:
                terms.append(PartialFractionTerm(index, shift, power, coeff))
    return PartialFractionExpansion(
        linear_coeff=quotient.coefficient(1),
        const_coeff=quotient.coefficient(0),
        terms=tuple(terms),
    )


def chebyshev_points(lo: float, hi: float, count: int = 64) -> np.ndarray:
    """Chebyshev-spaced sample points on [lo, hi], ascending."""
    if count < 2:
        raise ValueError("need at least two sample points")
    k = np.arange(count, dtype=float)
    nodes = np.cos((2 * k + 1) * math.pi / (2 * count))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes[::-1]


@dataclass(frozen=True)
class LogAffineFit:
    """Least-squares fit of samples against {log|x+c_l|} + {1, x}."""

    shifts: tuple[float, ...]
    log_coeffs: tuple[float, ...]
    const_coeff: float
    linear_coeff: float
    residual_sup: float


def log_affine_fit(
    shifts: Sequence[float],
    xs: np.ndarray,
    target: np.ndarray | Callable[[np.ndarray], np.ndarray],
) -> LogAffineFit:
    """Fit target(x) ~ sum_l a_l log|x + c_l| + b0 + b1 x on the given points.

    Needs at least 2*len(shifts) + 2 sample points, none on a singular point
    x = -c_l.  A rank-deficient design matrix (coincident shifts, degenerate
    point sets) raises DegenerateGridError.
    """
    cs = [float(c) for c in shifts]
    if len(set(cs)) != len(cs):
        raise DegenerateGridError("degenerate sample grid: repeated shifts")
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size < 2 * len(cs) + 2:
        raise ValueError(
            f"need at least {2 * len(cs) + 2} sample points, got {xs.size}"
        )
    ys = np.asarray(target(xs) if callable(target) else target, dtype=float)
    if ys.shape != xs.shape:
        raise ValueError("target samples must match the sample points")
    with np.errstate(divide="ignore"):
        cols = [np.log(np.abs(xs + c)) for c in cs]
    cols.append(np.ones_like(xs))
    cols.append(xs)
    design = np.column_stack(cols)
    if not np.all(np.isfinite(design)):
        raise ValueError("sample point on a singular point x = -c")
    if not np.all(np.isfinite(ys)):
        raise ValueError("target samples must be finite")
    coeffs, _, rank, _ = np.linalg.lstsq(design, ys, rcond=None)
    if rank < design.shape[1]:
        raise DegenerateGridError(
            "degenerate sample grid: singular normal equations "
            f"(rank {rank} < {design.shape[1]})"
        )
    misfit = design @ coeffs - ys
    return LogAffineFit(
        shifts=tuple(cs),
        log_coeffs=tuple(float(c) for c in coeffs[: len(cs)]),
        const_coeff=float(coeffs[len(cs)]),
        linear_coeff=float(coeffs[len(cs) + 1]),
        residual_sup=float(np.max(np.abs(misfit))) if misfit.size else 0.0,
    )
