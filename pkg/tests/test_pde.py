import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from susyflow import pde
from susyflow.calculus import FieldCandidate
from susyflow.grassmann import ParityError
from susyflow.superfield import SusyParams, random_superfield, standard_context


def quad(a, b, c):
    """a x^2 + b xy + c y^2 with exact partials."""
    return FieldCandidate(
        lambda x, y: a * x * x + b * x * y + c * y * y,
        {
            (1, 0): lambda x, y: 2 * a * x + b * y,
            (0, 1): lambda x, y: b * x + 2 * c * y,
            (2, 0): lambda x, y: 2 * a,
            (1, 1): lambda x, y: b,
            (0, 2): lambda x, y: 2 * c,
        },
        "quad",
    )


@settings(max_examples=50, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.sampled_from([1, -1]))
def test_classical_residual_matches_hand_expansion(a, b, c, x, y, eps):
    px, py = 2 * a * x + b * y, b * x + 2 * c * y
    want = (1 - eps * px * px) * 2 * a - 2 * px * py * b + (1 - eps * py * py) * 2 * c
    got = pde.classical_residual(quad(a, b, c), eps, (x, y))
    assert abs(got - want) < 1e-12


def test_linear_fields_are_solutions():
    f = FieldCandidate(lambda x, y: 0.3 * x - 1.2 * y + 4, label="plane")
    for eps in (1, -1):
        assert abs(pde.classical_residual(f, eps, (0.2, 0.9))) < 1e-9


def test_epsilon_validation():
    with pytest.raises(ValueError):
        pde.classical_residual(quad(1, 0, 0), 0, (0, 0))


def test_classical_rejects_nilpotent_field():
    ctx = standard_context()
    a, b = ctx.gens("eta1", "eta2")
    f = FieldCandidate(lambda x, y: x + x * (a * b), label="soulful")
    with pytest.raises(ParityError):
        pde.classical_residual(f, 1, (0.5, 0.5))


def test_sample_error_estimate_nonnegative():
    s = pde.classical_sample(FieldCandidate(lambda x, y: math.sin(x) * y), 1, (0.3, 0.4))
    assert s.fd_error_estimate >= 0
    assert s.magnitude == abs(s.value)


def test_special_tables_are_the_zero_parameter_case():
    ctx = standard_context(("theta", "e1", "e2", "e3"))
    rng = np.random.default_rng(4)
    phi = random_superfield(ctx, rng, density=0.6)
    for eps in (1, -1):
        p = SusyParams(epsilon=eps)
        bos = pde.susy_residual_bosonic(phi.B, phi.A, p, (0.1, 0.2), ctx=ctx)
        fer = pde.susy_residual_fermionic(phi.B, phi.A, p, (0.1, 0.2), ctx=ctx)
        sb, sf = pde.special_residuals(phi.B, phi.A, eps, (0.1, 0.2), ctx=ctx)
        assert (bos - sb).norm() < 1e-12
        assert (fer - sf).norm() < 1e-12


def test_psi_zero_reduces_to_classical():
    ctx = standard_context()
    f = FieldCandidate(lambda x, y: math.sin(x) * math.cosh(0.5 * y), label="f")
    zero = FieldCandidate(lambda x, y: ctx.zero(), label="0")
    for eps in (1, -1):
        bos, fer = pde.special_residuals(f, zero, eps, (0.4, 0.2), ctx=ctx)
        assert abs(bos.body - pde.classical_residual(f, eps, (0.4, 0.2))) < 1e-9
        assert fer.is_zero(1e-12)


def test_required_partials_listed():
    req = pde.required_partials(pde.BOSONIC_TERMS)
    assert ("psi", (1, 2)) in req and ("phi", (0, 2)) in req
