"""Profile ODE tests: frozen right-hand sides, conservation, truncation."""

import math

import numpy as np
import pytest

from staticgeo.errors import ParameterError, ProfileSingularityError, StepTooCoarseError
from staticgeo.profile import (
    CASE_GENERAL,
    CASE_I,
    CASE_II,
    CASE_III,
    CASE_IV,
    DELTA_MIN,
    OdeSpec,
    ProfileSamples,
    first_integral,
    integrate,
    rhs,
    third_derivative,
)


def test_rhs_case_iii_at_zero_crossing():
    spec = OdeSpec(case=CASE_III, n=4, R=12.0)
    assert rhs(spec, (0.0, 1.0)) == 0.0
    assert rhs(spec, (0.5, 0.0)) == pytest.approx(-0.5)


def test_rhs_case_ii_balances_at_unit_height():
    spec = OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0)
    assert rhs(spec, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-15)
    assert rhs(spec, (2.0, 0.0)) == pytest.approx(-2.0 + 0.25)


def test_rhs_general_single_shift():
    spec = OdeSpec(case=CASE_GENERAL, n=4, R=0.0, a=1.0, c_list=(0,))
    assert rhs(spec, (2.0, 0.3)) == pytest.approx(0.5)
    assert rhs(spec, (1.0, 0.0)) == pytest.approx(1.0)


def test_rhs_case_i_with_and_without_tail():
    spec = OdeSpec(case=CASE_I, n=6, R=10.0, k=3, c2=2.0)
    assert rhs(spec, (1.0, 0.0)) == pytest.approx(-0.5 + 2.0)
    flat = OdeSpec(case=CASE_I, n=4, R=6.0, k=3)  # n-k = 1: pure linear
    assert rhs(flat, (2.0, 0.0)) == pytest.approx(-2.0)


def test_rhs_case_iv():
    spec = OdeSpec(case=CASE_IV, n=4, R=3.0, k=2)
    assert spec.kappa == pytest.approx(0.5)
    assert rhs(spec, (1.0, 7.0)) == pytest.approx(-0.5)


def test_first_integral_case_ii_frozen_value():
    spec = OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0)
    assert first_integral(spec, (1.0, 0.0)) == pytest.approx(3.0)


def test_first_integral_case_iii_pythagorean():
    spec = OdeSpec(case=CASE_III, n=3, R=6.0)  # kappa = 1
    for t in np.linspace(0.0, 2.0, 9):
        assert first_integral(spec, (math.sin(t), math.cos(t))) == pytest.approx(1.0)


def test_first_integral_case_i_values():
    spec = OdeSpec(case=CASE_I, n=6, R=10.0, k=3, c2=2.0)
    assert first_integral(spec, (1.0, 0.1)) == pytest.approx(0.01 + 0.5 + 2.0)
    flat = OdeSpec(case=CASE_I, n=4, R=0.0, k=3)
    assert first_integral(flat, (5.0, 0.7)) == pytest.approx(0.49)


@pytest.mark.parametrize(
    "spec, init",
    [
        (OdeSpec(case=CASE_II, n=4, R=5.0, a=-0.5), (1.3, 0.2)),
        (OdeSpec(case=CASE_I, n=6, R=10.0, k=3, c2=2.0), (1.1, 0.1)),
        (OdeSpec(case=CASE_GENERAL, n=4, R=12.0, a=1.0, c_list=(0, 1)), (1.0, -0.5)),
    ],
)
def test_first_integral_is_conserved_along_flow(spec, init):
    samples = integrate(spec, init, (0.0, 0.3), 1e-3)
    assert samples.drift < 1e-10


def test_rejects_a_zero_with_reason():
    with pytest.raises(ParameterError, match="degenerate: a=0 forces f constant"):
        OdeSpec(case=CASE_II, n=3, R=6.0, a=0.0)
    with pytest.raises(ParameterError, match="degenerate: a=0 forces f constant"):
        OdeSpec(case=CASE_GENERAL, n=4, R=1.0, a=0.0, c_list=(0,))


def test_parameter_validation():
    with pytest.raises(ParameterError, match="unknown case"):
        OdeSpec(case="warped", n=4)
    with pytest.raises(ParameterError, match="n must be"):
        OdeSpec(case=CASE_III, n=2, R=1.0)
    with pytest.raises(ParameterError, match="case i needs"):
        OdeSpec(case=CASE_I, n=4, R=1.0, k=1)
    with pytest.raises(ParameterError, match="no c2 term"):
        OdeSpec(case=CASE_I, n=4, R=1.0, k=3, c2=1.0)
    with pytest.raises(ParameterError, match="case iv needs"):
        OdeSpec(case=CASE_IV, n=4, R=1.0, k=4)
    with pytest.raises(ParameterError, match="distinct"):
        OdeSpec(case=CASE_GENERAL, n=4, R=1.0, a=1.0, c_list=(1, 1))


def test_sine_solution_reproduced():
    spec = OdeSpec(case=CASE_III, n=4, R=12.0)
    samples = integrate(spec, (0.0, 1.0), (0.0, math.pi / 2), 1e-3)
    assert np.max(np.abs(samples.f - np.sin(samples.s))) < 1e-10
    # h is the antiderivative of f, pinned to 0 at the left endpoint
    assert np.max(np.abs(samples.h - (1.0 - np.cos(samples.s)))) < 1e-10
    assert samples.s[-1] <= math.pi / 2


def test_hyperbolic_and_linear_cases():
    spec = OdeSpec(case=CASE_III, n=3, R=-6.0)  # kappa = -1
    samples = integrate(spec, (0.0, 1.0), (0.0, 1.0), 1e-3)
    assert np.max(np.abs(samples.f - np.sinh(samples.s))) < 1e-9
    spec0 = OdeSpec(case=CASE_III, n=5, R=0.0)
    flat = integrate(spec0, (0.25, 2.0), (0.0, 1.0), 1e-3)
    assert np.max(np.abs(flat.f - (0.25 + 2.0 * flat.s))) < 1e-12


def test_aliasing_is_exact():
    spec = OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0)
    samples = integrate(spec, (1.2, 0.3), (0.0, 0.4), 1e-3)
    assert samples.f is samples.h1
    assert samples.f1 is samples.h2
    assert samples.f2 is samples.h3
    assert len(samples) == 401
    assert np.all(np.diff(samples.s) > 0)


def test_h2_matches_rhs_and_h3_matches_fd():
    for spec, init in [
        (OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0), (1.2, 0.3)),
        (OdeSpec(case=CASE_I, n=6, R=10.0, k=3, c2=2.0), (1.1, 0.1)),
        (OdeSpec(case=CASE_GENERAL, n=4, R=12.0, a=1.0, c_list=(0, 1)), (1.0, -0.5)),
        (OdeSpec(case=CASE_IV, n=6, R=-4.0, k=3), (0.5, 1.0)),
    ]:
        samples = integrate(spec, init, (0.0, 0.3), 1e-3)
        if spec.linear_state:
            # the state's f'' = rhs(f) lands in h3; h2 carries the integrated f'
            expect3 = [rhs(spec, (y0, y1)) for y0, y1 in zip(samples.f, samples.f1)]
            assert np.max(np.abs(samples.h3 - expect3)) < 1e-12
        else:
            expect = [rhs(spec, (y0, y1)) for y0, y1 in zip(samples.h, samples.h1)]
            assert np.max(np.abs(samples.h2 - expect)) < 1e-12
        fd3 = (samples.h2[2:] - samples.h2[:-2]) / (2e-3)
        assert np.max(np.abs(fd3 - samples.h3[1:-1])) < 1e-4  # O(step^2)


def test_singular_initial_condition_rejected():
    spec = OdeSpec(case=CASE_GENERAL, n=4, R=0.0, a=1.0, c_list=(0, 1))
    with pytest.raises(ProfileSingularityError, match="initial condition"):
        integrate(spec, (5e-4, 0.1), (0.0, 0.1), 1e-3)
    with pytest.raises(ProfileSingularityError, match="h - 1/2"):
        rhs(OdeSpec(case=CASE_GENERAL, n=4, R=0.0, a=1.0, c_list=(-0.5,)), (0.5004, 0.0))


def test_wall_approach_truncates_grid():
    spec = OdeSpec(case=CASE_II, n=3, R=0.0, a=-1.0)
    samples = integrate(spec, (0.5, -0.5), (0.0, 1.0), 1e-3, drift_guard=None)
    assert samples.truncated
    assert samples.s[-1] < 1.0
    assert np.min(np.abs(samples.h)) >= DELTA_MIN
    assert samples.requested == (0.0, 1.0)


def test_coarse_step_raises():
    spec = OdeSpec(case=CASE_II, n=3, R=0.0, a=1.0)
    with pytest.raises(StepTooCoarseError, match="step too coarse"):
        integrate(spec, (0.02, 0.0), (0.0, 0.1), 1e-2)


def test_general_single_shift_conservation_example():
    spec = OdeSpec(case=CASE_GENERAL, n=3, R=0.0, a=0.5, c_list=(0,))
    samples = integrate(spec, (1.0, 0.0), (0.0, 1.0), 1e-3)
    assert samples.drift < 1e-9
    # first integral is (h')^2 - 2a log h here; check against the closed form
    fi = samples.h1**2 - np.log(samples.h)
    assert np.max(np.abs(fi - fi[0])) < 1e-9


def test_drift_order_is_four():
    spec = OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0)
    coarse = integrate(spec, (0.3, 0.0), (0.0, 0.8), 2e-3)
    fine = integrate(spec, (0.3, 0.0), (0.0, 0.8), 1e-3)
    assert 12.0 < coarse.drift / fine.drift < 20.0


def test_fi_fd_derivative_small_at_default_step():
    spec = OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0)
    samples = integrate(spec, (1.2, 0.3), (0.0, 0.4), 1e-3)
    fd = np.abs(np.diff(samples.fi_values)) / 1e-3
    assert np.max(fd) <= 1e-6


def test_third_derivative_closed_forms():
    spec = OdeSpec(case=CASE_II, n=3, R=6.0, a=1.0)
    # h''' = h' (-R/(n(n-1)) + (1-n) a h^-n) = h'(-1 - 2 h^-3)
    assert third_derivative(spec, (1.0, 2.0)) == pytest.approx(2.0 * (-1.0 - 2.0))
    lin = OdeSpec(case=CASE_III, n=3, R=6.0)
    assert third_derivative(lin, (0.7, 0.2)) == pytest.approx(-0.2)


def test_requested_range_validation():
    spec = OdeSpec(case=CASE_III, n=3, R=6.0)
    with pytest.raises(ParameterError):
        integrate(spec, (0.0, 1.0), (1.0, 0.5), 1e-3)
    with pytest.raises(ParameterError):
        integrate(spec, (0.0, 1.0), (0.0, 1.0), -1e-3)
    with pytest.raises(ParameterError, match="no full step"):
        integrate(spec, (0.0, 1.0), (0.0, 1e-5), 1e-3)
