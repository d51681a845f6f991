"""Multiply-warped metric models over an integrated profile.

Fibers are abstract: only (dimension, Einstein constant) enter the radial
reduction, so each model is a list of Ricci-eigenvalue blocks over the
s-grid.  Block eigenvalues come from the standard warped-product curvature
formulas; ζ-profiles are the shape quantities h'/(warping) per block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from staticgeo.errors import ConstraintError, ParameterError, RegularityError
from staticgeo.profile import (
    CASE_I,
    CASE_II,
    CASE_III,
    CASE_IV,
    DRIFT_GUARD,
    OdeSpec,
    ProfileSamples,
    first_integral,
    integrate,
)

RADIAL = "radial"
WARPED_FIBER = "warped-fiber"
FLAT_FACTOR = "flat-product-factor"

#: Regular-set guard: |f'| below this is treated as a critical point.
F_PRIME_FLOOR = 1e-12

#: Warping functions this close to zero mean the metric has pinched off.
WARPING_FLOOR = 1e-9


def distinct_tolerance(values: np.ndarray) -> float:
    """Clustering width used when deciding whether eigenvalues coincide."""
    scale = float(np.max(np.abs(values))) if np.size(values) else 0.0
    return max(1e-6 * scale, 1e-12)


@dataclass(frozen=True)
class FiberSpec:
    """Abstract Einstein factor: r_fiber = einstein_constant * g_fiber."""

    dim: int
    einstein_constant: float
    label: str = "N"

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ParameterError(f"fiber dimension must be a positive integer, got {self.dim}")
        if self.dim == 1 and self.einstein_constant != 0:
            raise ParameterError(
                f"a 1-dimensional fiber has no curvature: einstein_constant must be 0, "
                f"got {self.einstein_constant}"
            )


@dataclass(frozen=True)
class Block:
    """One Ricci-eigenvalue block along the grid."""

    label: str
    provenance: str  # RADIAL | WARPED_FIBER | FLAT_FACTOR
    multiplicity: int
    lam: np.ndarray
    zeta: np.ndarray | None  # None for the radial block
    zeta_prime: np.ndarray | None
    fiber: FiberSpec | None = None


@dataclass(frozen=True)
class MetricModel:
    case: str
    n: int
    R: float
    profile: ProfileSamples
    blocks: tuple[Block, ...]
    product_scale: float = 1.0
    f_scale: float = 1.0

    def __post_init__(self):
        # Exact Fractions are welcome in OdeSpec; downstream reporting needs floats.
        object.__setattr__(self, "R", float(self.R))
        total = sum(b.multiplicity for b in self.blocks)
        if total != self.n:
            raise ParameterError(f"block multiplicities sum to {total}, expected n={self.n}")

    @property
    def f(self) -> np.ndarray:
        return self.f_scale * self.profile.f

    @property
    def f1(self) -> np.ndarray:
        return self.f_scale * self.profile.f1

    @property
    def f2(self) -> np.ndarray:
        return self.f_scale * self.profile.f2

    @property
    def fibers(self) -> tuple[FiberSpec, ...]:
        seen = []
        for b in self.blocks:
            if b.fiber is not None and b.fiber not in seen:
                seen.append(b.fiber)
        return tuple(seen)


def warped_fiber_lambda(phi, phi1, phi2, d_w: int, kappa_f: float):
    """Fiber-tangent Ricci eigenvalue of ds² + φ(s)²g_fiber.

    For d_w = 1 the curvature term vanishes and kappa_f is unused.
    """
    out = -phi2 / phi
    if d_w >= 2:
        out = out - (d_w - 1) * (phi1**2 - kappa_f) / phi**2
    return out


def _require_close(context: str, lhs: float, rhs: float, tol: float = 1e-12) -> None:
    scale = max(1.0, abs(lhs), abs(rhs))
    if abs(lhs - rhs) > tol * scale:
        raise ConstraintError(f"{context}: {lhs!r} != {rhs!r}")


def _check_warping(phi: np.ndarray, name: str) -> None:
    if np.min(np.abs(phi)) < WARPING_FLOOR:
        raise RegularityError(f"warping function {name} vanishes on the grid")
    if np.min(phi) < 0 < np.max(phi):
        raise RegularityError(f"warping function {name} changes sign on the grid")


def _match_fibers(required: list[FiberSpec], supplied: Sequence[FiberSpec] | None) -> list[FiberSpec]:
    if supplied is None:
        return required
    if len(supplied) != len(required):
        raise ConstraintError(
            f"expected {len(required)} fiber(s), got {len(supplied)}"
        )
    out = []
    for want, got in zip(required, supplied):
        if got.dim != want.dim:
            raise ConstraintError(f"fiber {got.label!r} has dim {got.dim}, expected {want.dim}")
        _require_close(
            f"fiber {got.label!r} einstein_constant", got.einstein_constant, want.einstein_constant
        )
        out.append(got)
    return out


def build_case(
    spec: OdeSpec,
    init: Sequence[float],
    s_range: tuple[float, float],
    step: float,
    fibers: Sequence[FiberSpec] | None = None,
    product_scale: float = 1.0,
    f_scale: float = 1.0,
    k2: float | None = None,
    drift_guard: float | None = DRIFT_GUARD,
) -> MetricModel:
    """Integrate the profile and assemble the block structure for one family.

    Fibers may be supplied for validation; omitted, they are synthesized with
    the Einstein constants the profile's first integral dictates.  Constraint
    violations report both sides' values.
    """
    if spec.case == CASE_I:
        return _build_i(spec, init, s_range, step, fibers, product_scale, f_scale, k2, drift_guard)
    if spec.case == CASE_II:
        return _build_ii(spec, init, s_range, step, fibers, drift_guard)
    if spec.case == CASE_III:
        return _build_iii(spec, init, s_range, step, fibers, drift_guard)
    if spec.case == CASE_IV:
        return _build_iv(spec, init, s_range, step, fibers, drift_guard)
    raise ParameterError(f"build_case handles the four model families, not {spec.case!r}")


def _build_ii(spec, init, s_range, step, fibers, drift_guard):
    samples = integrate(spec, init, s_range, step, drift_guard=drift_guard)
    n, R = spec.n, spec.R
    _check_warping(samples.h, "h")
    k_fib = float(first_integral(spec, (float(init[0]), float(init[1]))))
    fiber = FiberSpec(dim=n - 1, einstein_constant=(n - 2) * k_fib, label="N")
    (fiber,) = _match_fibers([fiber], fibers)
    h, h1, h2 = samples.h, samples.h1, samples.h2
    lam_radial = -(n - 1) * h2 / h
    lam_fiber = warped_fiber_lambda(h, h1, h2, n - 1, k_fib)
    zeta = h1 / h
    blocks = (
        Block("radial", RADIAL, 1, lam_radial, None, None),
        Block(fiber.label, WARPED_FIBER, n - 1, lam_fiber, zeta, h2 / h - zeta**2, fiber),
    )
    return MetricModel(case=spec.case, n=n, R=R, profile=samples, blocks=blocks)


def _build_iii(spec, init, s_range, step, fibers, drift_guard):
    samples = integrate(spec, init, s_range, step, drift_guard=drift_guard)
    n, R = spec.n, spec.R
    kappa = spec.kappa
    _check_warping(samples.f1, "f'")
    f0, f10 = float(init[0]), float(init[1])
    kappa_f = (kappa * f0) ** 2 + kappa * f10**2  # conserved: (f'')² + κ(f')²
    fiber = FiberSpec(dim=n - 1, einstein_constant=(n - 2) * kappa_f, label="N~")
    (fiber,) = _match_fibers([fiber], fibers)
    f1, f2 = samples.f1, samples.f2
    f3 = -kappa * f1  # third derivative of the potential
    lam_radial = -(n - 1) * f3 / f1
    lam_fiber = warped_fiber_lambda(f1, f2, f3, n - 1, kappa_f)
    zeta = f2 / f1
    blocks = (
        Block("radial", RADIAL, 1, lam_radial, None, None),
        Block(fiber.label, WARPED_FIBER, n - 1, lam_fiber, zeta, -kappa - zeta**2, fiber),
    )
    return MetricModel(case=spec.case, n=n, R=R, profile=samples, blocks=blocks)


def _build_i(spec, init, s_range, step, fibers, product_scale, f_scale, k2, drift_guard):
    n, R, k = spec.n, spec.R, spec.k
    p = float(product_scale)
    if p == 0:
        raise ParameterError("product_scale must be nonzero")
    target = R / (n - 1)
    if k == 2:
        # 1-dimensional first factor: its eigenvalue is 0, so R must vanish
        flat_constant = 0.0
        _require_close("(k-2)k2/p^2 = R/(n-1)", 0.0, target)
        if k2 not in (None, 0):
            raise ParameterError("k=2 leaves no curvature on the first factor; omit k2")
    else:
        if k2 is None:
            k2 = target * p**2 / (k - 2)
        flat_constant = (k - 2) * k2
        _require_close("(k-2)k2/p^2 = R/(n-1)", flat_constant / p**2, target)

    samples = integrate(spec, init, s_range, step, drift_guard=drift_guard)
    _check_warping(samples.h, "h")
    d_w = n - k
    k_n = float(first_integral(spec, (float(init[0]), float(init[1]))))
    required = [
        FiberSpec(dim=k - 1, einstein_constant=flat_constant if k >= 3 else 0.0, label="N1"),
        FiberSpec(
            dim=d_w,
            einstein_constant=(d_w - 1) * k_n if d_w >= 2 else 0.0,
            label="N2",
        ),
    ]
    flat_fiber, warp_fiber = _match_fibers(required, fibers)

    h, h1, h2 = samples.h, samples.h1, samples.h2
    ones = np.ones_like(h)
    lam_flat = (flat_constant / p**2) * ones
    lam_radial = -d_w * h2 / h
    lam_fiber = warped_fiber_lambda(h, h1, h2, d_w, k_n)
    zeta = h1 / h
    blocks = (
        Block(flat_fiber.label, FLAT_FACTOR, k - 1, lam_flat, 0.0 * ones, 0.0 * ones, flat_fiber),
        Block("radial", RADIAL, 1, lam_radial, None, None),
        Block(warp_fiber.label, WARPED_FIBER, d_w, lam_fiber, zeta, h2 / h - zeta**2, warp_fiber),
    )
    return MetricModel(
        case=spec.case,
        n=n,
        R=R,
        profile=samples,
        blocks=blocks,
        product_scale=p,
        f_scale=f_scale,
    )


def _build_iv(spec, init, s_range, step, fibers, drift_guard):
    n, R, k = spec.n, spec.R, spec.k
    kappa = spec.kappa
    lam1 = (1 - 1 / k) * R / (n - 1)
    lam2 = R / (n - 1)
    if n - k == 1 and R != 0:
        raise ConstraintError(
            f"second factor is 1-dimensional: its eigenvalue must be 0, not R/(n-1) = {lam2!r}"
        )
    samples = integrate(spec, init, s_range, step, drift_guard=drift_guard)
    required = [
        FiberSpec(dim=k, einstein_constant=lam1 if k >= 2 else 0.0, label="N1"),
        FiberSpec(dim=n - k, einstein_constant=lam2 if n - k >= 2 else 0.0, label="N2"),
    ]
    first, second = _match_fibers(required, fibers)

    f, f1 = samples.f, samples.f1
    ones = np.ones_like(f)
    blocks = [Block("radial", RADIAL, 1, lam1 * ones, None, None)]
    if k >= 2:
        _require_regular(f1)
        zeta_t = -kappa * f / f1
        blocks.append(
            Block(first.label, WARPED_FIBER, k - 1, lam1 * ones, zeta_t, -kappa - zeta_t**2, first)
        )
    blocks.append(Block(second.label, FLAT_FACTOR, n - k, lam2 * ones, 0.0 * ones, 0.0 * ones, second))
    return MetricModel(case=spec.case, n=n, R=R, profile=samples, blocks=tuple(blocks))


def ricci_spectrum(model: MetricModel) -> list[list[tuple[float, int]]]:
    """Per-node (eigenvalue, multiplicity) pairs, coincident values merged."""
    lams = np.column_stack([b.lam for b in model.blocks])
    mults = [b.multiplicity for b in model.blocks]
    tol = distinct_tolerance(lams)
    out = []
    for row in lams:
        order = np.argsort(row)
        merged: list[tuple[float, int]] = []
        for idx in order:
            value, mult = float(row[idx]), mults[idx]
            if merged and abs(value - merged[-1][0]) <= tol:
                prev_v, prev_m = merged[-1]
                # weight the representative value by multiplicity
                total = prev_m + mult
                merged[-1] = ((prev_v * prev_m + value * mult) / total, total)
            else:
                merged.append((value, mult))
        out.append(merged)
    return out


@dataclass(frozen=True)
class ZetaComparison:
    label: str
    shape: np.ndarray
    spectral: np.ndarray
    difference: np.ndarray


def _require_regular(f1: np.ndarray) -> None:
    vanishes = np.min(np.abs(f1)) < F_PRIME_FLOOR
    crosses = np.min(f1) < 0 < np.max(f1)
    if vanishes or crosses:
        raise RegularityError("not on regular set: f' vanishes on the grid")


def zeta_profile(model: MetricModel) -> list[ZetaComparison]:
    """ζ per non-radial block, computed both ways, with pointwise differences.

    The shape route reads the block's stored ζ; the spectral route solves the
    eigenvalue relation for ζ, which needs f' ≠ 0 on the whole grid.
    """
    f, f1 = model.f, model.f1
    _require_regular(f1)
    shift = model.R / (model.n - 1)
    out = []
    for b in model.blocks:
        if b.provenance == RADIAL:
            continue
        spectral = f * (b.lam - shift) / f1
        out.append(ZetaComparison(b.label, b.zeta, spectral, b.zeta - spectral))
    return out
