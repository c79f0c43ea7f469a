import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from susyflow.grassmann import (
    ContextError,
    GeneratorSet,
    GrassmannNumber,
    NoRootError,
    Parity,
    g_exp,
    g_log,
    g_mul,
    g_parity,
    g_pow,
    g_solve_implicit,
    g_sqrt,
    random_element,
    reorder_sign,
)

CTX = GeneratorSet(("a", "b", "c", "d", "e"))


def perm_product(m1, m2):
    """Product of two monomials (index tuples) by sorting with explicit transpositions."""
    seq = list(m1) + list(m2)
    if len(set(seq)) < len(seq):
        return 0, ()
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


def mono(ctx, idx):
    return GrassmannNumber(ctx, {sum(1 << i for i in idx): 1.0})


def test_perm_oracle_small_generator_set():
    ctx = GeneratorSet(tuple("pqrs"))
    subsets = [c for r in range(5) for c in itertools.combinations(range(4), r)]
    for m1 in subsets:
        for m2 in subsets:
            sign, m = perm_product(m1, m2)
            got = g_mul(mono(ctx, m1), mono(ctx, m2))
            want = GrassmannNumber(ctx, {sum(1 << i for i in m): sign}) if sign else ctx.zero()
            assert got == want


def test_reorder_sign_transposition():
    assert reorder_sign(0b01, 0b10) == 1
    assert reorder_sign(0b10, 0b01) == -1
    assert reorder_sign(0b110, 0b001) == 1


def elements(parity=None):
    seeds = st.integers(0, 2**31 - 1)
    return seeds.map(lambda s: random_element(CTX, np.random.default_rng(s), parity, 0.4))


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_associative_and_distributive(x, y, z):
    assert ((x * y) * z - x * (y * z)).norm() < 1e-12
    assert (x * (y + z) - (x * y + x * z)).norm() < 1e-12


@settings(max_examples=60, deadline=None)
@given(elements(Parity.ODD), elements(Parity.ODD), elements(Parity.EVEN))
def test_supercommutation(o1, o2, e):
    assert (o1 * o2 + o2 * o1).norm() < 1e-12
    assert (e * o1 - o1 * e).norm() < 1e-12
    assert (o1 * o1).norm() < 1e-12


@settings(max_examples=40, deadline=None)
@given(elements(Parity.EVEN))
def test_exp_log_roundtrip(e):
    x = e + 2.0
    assert (g_log(g_exp(x)) - x).norm() < 1e-10
    assert (g_exp(g_log(x)) - x).norm() < 1e-10
    assert (g_sqrt(x) * g_sqrt(x) - x).norm() < 1e-10
    assert (g_pow(x, 3) - x * x * x).norm() < 1e-10


def test_soul_is_nilpotent():
    rng = np.random.default_rng(3)
    s = random_element(CTX, rng, Parity.EVEN, 1.0).soul
    p = CTX.scalar(1.0)
    for _ in range(s.nilpotency_bound()):
        p = p * s
    assert p.is_zero()


def test_parity_classification():
    a, b = CTX.gens("a", "b")
    assert g_parity(a) is Parity.ODD
    assert g_parity(a * b) is Parity.EVEN
    assert g_parity(a + a * b) is Parity.MIXED


def test_inverse_and_division():
    a, b = CTX.gens("a", "b")
    x = 2.0 + a * b
    assert (x * x.inverse() - 1.0).norm() < 1e-14
    with pytest.raises(ZeroDivisionError):
        (a * b).inverse()


def test_context_mismatch():
    other = GeneratorSet(("a", "b"))
    with pytest.raises(ContextError):
        CTX.gen("a") + other.gen("a")


def test_solve_implicit_soul_newton():
    a, b, c, d = CTX.gens("a", "b", "c", "d")
    shift = a * b + 0.5 * c * d

    def rel(w):
        return w * w * w + w - (2.0 + shift)

    w = g_solve_implicit(rel, 1.0, CTX)
    assert rel(w).norm() < 1e-13
    assert abs(w.body - 1.0) < 1e-14


def test_solve_implicit_no_root():
    with pytest.raises(NoRootError):
        g_solve_implicit(lambda w: w * w + 1.0, 0.3, CTX)


def test_exp_of_nilpotent_truncates():
    a, b = CTX.gens("a", "b")
    got = g_exp(CTX.scalar(0.0) + a * b)
    assert got == 1.0 + a * b
    assert math.isclose(g_exp(CTX.scalar(1.0)).body.real, math.e)
