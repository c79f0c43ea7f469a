import math

import pytest
from hypothesis import given, settings, strategies as st

from susyflow.calculus import (
    DiffConfig,
    FieldCandidate,
    JetCache,
    RegistrationError,
    StencilError,
    combination,
    constant,
    curve,
    dcurve,
    partial,
    partial_estimate,
    register,
    shifted,
)
from susyflow.grassmann import GeneratorSet, Parity, ParityError


def wave(a, b):
    """sin(a x) exp(b y) and its closed-form partials."""

    def d(i, j):
        ph = [math.sin, math.cos, lambda t: -math.sin(t), lambda t: -math.cos(t)][i % 4]
        return lambda x, y: a**i * ph(a * x) * b**j * math.exp(b * y)

    return FieldCandidate(d(0, 0), label="wave"), d


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 2.0), st.floats(-1.0, 1.0), st.floats(-1, 1), st.floats(-1, 1),
       st.sampled_from([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]))
def test_partials_match_closed_form(a, b, x, y, mi):
    f, d = wave(a, b)
    got = partial(f, (x, y), mi)
    want = d(*mi)(x, y)
    assert abs(got - want) <= 1e-8 * max(1.0, abs(want))


def test_error_estimate_reported():
    f, d = wave(1.3, 0.4)
    v, err = partial_estimate(f, (0.2, 0.1), (2, 0))
    assert err < 1e-8
    assert abs(v - d(2, 0)(0.2, 0.1)) < 1e-9


def test_shifted_adds_multi_indices():
    f, d = wave(0.9, 0.5)
    g = shifted(shifted(f, (1, 0)), (0, 1), coef=2.0)
    v, err = partial_estimate(g, (0.3, 0.2), (1, 0))
    assert abs(v - 2 * d(2, 1)(0.3, 0.2)) < 1e-8
    # resolved to one third-order stencil on f, not a difference of differences
    assert err < 1e-8


def test_combination_term_by_term():
    f, d = wave(1.1, 0.3)
    g, e = wave(0.7, -0.2)
    h = combination([(2.0, f), (-1.0, g)])
    want = 2 * d(1, 1)(0.4, 0.5) - e(1, 1)(0.4, 0.5)
    assert abs(partial(h, (0.4, 0.5), (1, 1)) - want) < 1e-8


def test_analytic_derivatives_take_priority():
    f = FieldCandidate(lambda x, y: x**3, {(1, 0): lambda x, y: 3 * x * x}, "cube")
    assert partial(f, (2.0, 0.0), (1, 0)) == 12.0


def test_register_rejects_wrong_derivative():
    with pytest.raises(RegistrationError):
        register(lambda x, y: x * y, {(1, 0): lambda x, y: 2 * y}, "bad")
    ok = register(lambda x, y: x * y, {(1, 0): lambda x, y: y}, "good")
    assert ok.analytic_derivs


def test_register_checks_parity():
    ctx = GeneratorSet(("a", "b"))
    a = ctx.gen("a")
    with pytest.raises(ParityError):
        register(lambda x, y: x * a * ctx.gen("b"), {}, "even", Parity.ODD)
    register(lambda x, y: x * a, {}, "odd", Parity.ODD)


def test_stencil_error_near_singularity():
    f = FieldCandidate(lambda x, y: math.log(x), label="log")
    with pytest.raises(StencilError):
        partial(f, (0.001, 0.0), (2, 0))


def test_grassmann_valued_partials():
    ctx = GeneratorSet(("a", "b"))
    a, b = ctx.gens("a", "b")
    f = FieldCandidate(lambda x, y: math.sin(x) * a + (x * y) * (a * b), label="g")
    v = partial(f, (0.3, 0.7), (1, 1))
    assert abs(v.coefficient("a", "b") - 1.0) < 1e-9
    assert abs(v.coefficient("a")) < 1e-9


def test_jet_cache_reuses_values():
    calls = []

    def fn(x, y):
        calls.append((x, y))
        return x * x * y

    f = FieldCandidate(fn, label="count")
    c = JetCache((0.5, 0.5))
    first = c(f, (1, 0))
    n = len(calls)
    assert c(f, (1, 0)) == first and len(calls) == n
    c(f, (2, 0))
    assert len(calls) > n


def test_curve_and_constant():
    c = curve(math.exp, {1: math.exp})
    assert dcurve(c, 0.5, 1) == math.exp(0.5)
    assert abs(dcurve(c, 0.5, 2) - math.exp(0.5)) < 1e-8
    k = constant(3.0)
    assert partial(k, (1.0, 2.0), (2, 1)) == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        DiffConfig(h=0.0)
    with pytest.raises(ValueError):
        DiffConfig(levels=0)
    assert DiffConfig().step(3) == pytest.approx(1e-3 * 14**2)
