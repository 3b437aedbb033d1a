import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from edgequant import _kernel
from edgequant.quantizers import (
    LOG_DELTA_U_MAX,
    Family,
    QuantizerSpec,
    quantize_log,
    quantize_uniform,
    quantize_vector,
)

reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
nonzero = st.floats(min_value=1e-200, max_value=1e200, allow_nan=False).flatmap(
    lambda m: st.sampled_from([m, -m]))
uniform_deltas = st.sampled_from([0.01, 0.1, 1.0, 3.0]) | st.floats(1e-4, 10.0)
log_deltas = st.sampled_from([0.01, 0.1, 0.5, 0.9]) | st.floats(1e-4, LOG_DELTA_U_MAX)


def test_uniform_hand_values():
    assert quantize_uniform(0.0, 1.0) == 0.5
    assert quantize_uniform(0.3, 1.0) == 0.5
    assert quantize_uniform(-0.3, 1.0) == -0.5
    assert quantize_uniform(2.99, 1.0) == 2.5
    assert quantize_uniform(0.26, 0.1) == pytest.approx(0.25)


def test_log_hand_values():
    assert quantize_log(0.0, 0.1) == 0.0
    # ln 1 = 0 sits on a lattice point, so 1 maps to exp(delta / 2)
    assert quantize_log(1.0, 0.1) == pytest.approx(math.exp(0.05))
    assert quantize_log(-1.0, 0.1) == pytest.approx(-math.exp(0.05))
    assert quantize_log(math.e, 1.0) == pytest.approx(math.exp(1.5))


def test_vector_shapes_and_none_family():
    v = np.arange(6.0).reshape(2, 3) - 2.5
    out = quantize_vector(v, QuantizerSpec.none())
    np.testing.assert_array_equal(out, v)
    assert out is not v
    assert quantize_vector(v, QuantizerSpec.uniform(1.0)).shape == (2, 3)
    np.testing.assert_array_equal(QuantizerSpec.logarithmic(0.1)(v), quantize_log(v, 0.1))


@pytest.mark.parametrize("kwargs, match", [
    (dict(family="cubic", delta_u=1.0), "family:"),
    (dict(family="uniform", delta_u=0.0), "delta_u:"),
    (dict(family="uniform", delta_u=-1.0), "delta_u:"),
    (dict(family="uniform", delta_u=math.inf), "delta_u:"),
    (dict(family="logarithmic", delta_u=1.0), "delta_u:"),
])
def test_spec_validation(kwargs, match):
    with pytest.raises(ValueError, match=match):
        QuantizerSpec(**kwargs)


def test_delta_l_relation():
    q = QuantizerSpec.logarithmic(0.5)
    assert q.delta_l == pytest.approx(1 - math.exp(-0.5), rel=1e-15)
    back = QuantizerSpec.logarithmic_from_delta_l(0.01)
    assert back.delta_l == pytest.approx(0.01, rel=1e-14)
    assert back.delta_u == pytest.approx(-math.log(0.99), rel=1e-14)
    assert QuantizerSpec.uniform(1.0).delta_l == 0.0
    assert QuantizerSpec("logarithmic", 0.1).family is Family.LOGARITHMIC


def test_error_bound():
    v = np.array([3.0, 4.0])
    assert QuantizerSpec.uniform(0.1).error_bound(v) == pytest.approx(math.sqrt(2) * 0.1)
    assert QuantizerSpec.logarithmic(0.1).error_bound(v) == pytest.approx(5 * (1 - math.exp(-0.1)))
    assert QuantizerSpec.none().error_bound(v) == 0.0
    for spec in (QuantizerSpec.uniform(0.3), QuantizerSpec.logarithmic(0.3)):
        assert np.linalg.norm(spec(v) - v) <= spec.error_bound(v)


def test_log_bound_fails_beyond_limit():
    # why the logarithmic family stops at LOG_DELTA_U_MAX: the worst-case
    # relative error exp(d/2) - 1 overtakes 1 - exp(-d) a little above it
    d = LOG_DELTA_U_MAX
    assert math.expm1(d / 2) < -math.expm1(-d)
    assert math.expm1(1.0 / 2) > -math.expm1(-1.0)


@pytest.mark.parametrize("code, delta", [(0, 0.0), (1, 0.1), (1, 3.0), (2, 0.01), (2, 0.9)])
def test_kernel_quantizer_matches_numpy(code, delta):
    rng = np.random.default_rng(3)
    x = rng.standard_normal(2000) * np.exp(rng.uniform(-5, 5, 2000))
    family = {0: Family.NONE, 1: Family.UNIFORM, 2: Family.LOGARITHMIC}[code]
    ref = quantize_vector(x, QuantizerSpec(family, delta))
    got = np.array([_kernel._q(val, code, delta) for val in x])
    np.testing.assert_allclose(got, ref, rtol=1e-13, atol=0)


# -- properties -----------------------------------------------------------

@settings(max_examples=500, deadline=None)
@given(reals, uniform_deltas)
def test_uniform_error_bound(x, delta):
    # a few ulps of slack for the rounded division x / delta
    slack = 4 * np.spacing(max(abs(x), delta))
    assert abs(quantize_uniform(x, delta) - x) <= delta / 2 + slack


@settings(max_examples=500, deadline=None)
@given(nonzero, log_deltas)
def test_log_relative_error_bound(x, delta):
    assume(abs(x) < 1e300)
    assert abs(quantize_log(x, delta) - x) <= -math.expm1(-delta) * abs(x)


@settings(max_examples=500, deadline=None)
@given(reals, log_deltas)
def test_log_is_odd(x, delta):
    assert quantize_log(-x, delta) == -quantize_log(x, delta)


@settings(max_examples=300, deadline=None)
@given(reals, reals, uniform_deltas)
def test_uniform_monotone(x, y, delta):
    lo, hi = min(x, y), max(x, y)
    assert quantize_uniform(lo, delta) <= quantize_uniform(hi, delta)


@settings(max_examples=300, deadline=None)
@given(reals, reals, log_deltas)
def test_log_monotone(x, y, delta):
    lo, hi = min(x, y), max(x, y)
    assert quantize_log(lo, delta) <= quantize_log(hi, delta)


@settings(max_examples=300, deadline=None)
@given(st.integers(-10**6, 10**6), uniform_deltas)
def test_uniform_fixes_lattice_midpoints(k, delta):
    mid = delta * (k + 0.5)
    assert quantize_uniform(mid, delta) == mid


@settings(max_examples=300, deadline=None)
@given(reals, uniform_deltas)
def test_uniform_output_on_lattice(x, delta):
    q = quantize_uniform(x, delta)
    k = q / delta - 0.5
    assert abs(k - round(k)) <= 1e-6 * max(1.0, abs(k))
