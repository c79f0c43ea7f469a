import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from susyflow import correspondences as C
from susyflow.calculus import FieldCandidate
from susyflow.specfun import DomainError

PTS = [(0.3, 0.2), (-0.4, 0.5), (0.1, -0.3), (0.8, 0.9)]


def test_web_closes():
    web = C.web_check(PTS)
    for name, v in web["residuals"].items():
        assert v <= 1e-6, name
    # literal reading of the Bianchi display: the two u_tt slots differ by 2 on travelling waves
    assert abs(web["bianchi_verbatim_gap"] - 2.0) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_wick_rotation_term_map(px, pt, pxx, pxt, ptt):
    j = {"x": px, "t": pt, "xx": pxx, "xt": pxt, "tt": ptt}
    ms = C.minimal_surface_from_jet(C.wick_rotate_jet(j))
    assert abs(ms + C.born_infeld_from_jet(j)) <= 1e-9 * (1 + sum(abs(v) for v in j.values())) ** 3


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_riemann_roundtrip_algebra(uxx, uxt):
    if abs(uxx) < 1e-3:
        return
    utt = (uxt * uxt - 1) / uxx  # Monge-Ampere fixes u_tt
    rp, rm = C.ma_to_riemann(uxx, uxt)
    back = C.riemann_to_ma(rp, rm)
    assert np.allclose(back, (uxx, uxt, utt), rtol=1e-10, atol=1e-10)


def test_riemann_domain_error():
    with pytest.raises(DomainError):
        C.riemann_values(0.1, 2.0)
    with pytest.raises(DomainError):
        C.riemann_to_ma(0.5, 0.5)
    with pytest.raises(DomainError):
        C.ma_to_riemann(0.0, 1.0)


def test_quadratic_ma_invariants():
    u = C.quadratic_ma()
    r = C.ma_riemann_roundtrip(u, (0.2, 0.7))
    assert r["R"] == (1.0, -1.0)
    assert r["monge_ampere"] == 0 and r["riemann"] == 0


def test_log_ma_invariants():
    u = C.log_ma(0.5)
    r = C.ma_riemann_roundtrip(u, (2.0, 0.4))
    assert math.isclose(r["R"][0], 2.0 + 0.5 * 0.4, rel_tol=1e-12)
    assert math.isclose(r["R"][1], 0.5, rel_tol=1e-12)
    assert abs(r["monge_ampere"]) < 1e-12
    assert r["riemann"] < 1e-8


def test_bianchi_readings():
    wave = C.travelling_wave(math.sin, math.cos, lambda s: -math.sin(s))
    b = C.bianchi_check(wave, (0.3, 0.1))
    assert abs(b["third_is_uxx"]) < 1e-12
    assert b["verbatim"] > 1.0
    with pytest.raises(DomainError):
        C.bianchi(0.0, 1.5)


def test_half_legendre_quadratic_closed_form():
    ut = C.half_legendre(C.quadratic_ma(), (-3.0, 3.0))
    # u = (s^2 - y^2)/2 gives u~ = -(z^2 + y^2)/2
    for z, y in ((0.5, 0.2), (-1.0, 0.7)):
        assert abs(ut.eval(z, y) + 0.5 * (z * z + y * y)) < 1e-12
        assert abs(C.wave_residual(ut, (z, y))) < 1e-8


def test_half_legendre_needs_monotone_u_s():
    u = FieldCandidate(lambda s, y: s**3 / 3 - s, {(1, 0): lambda s, y: s * s - 1}, "cubic")
    ut = C.half_legendre(u, (-2.0, 2.0))
    with pytest.raises(C.InvertibilityError):
        ut.eval(0.5, 0.0)
    ok = C.half_legendre(u, (1.5, 3.0))
    with pytest.raises(C.InvertibilityError):
        ok.eval(-5.0, 0.0)  # z outside the range of u_s on the patch


def test_chaplygin_from_constant_invariants():
    rp = FieldCandidate(lambda x, t: 0.0, label="0")
    rm = FieldCandidate(lambda x, t: -1.0, label="-1")
    U, V = C.chaplygin_fields_from_riemann(rp, rm)
    assert U.eval(0, 0) == -0.5 and V.eval(0, 0) == 2.0
    r = C.chaplygin_check(U, V, (0.1, 0.2))
    assert max(map(abs, r["chaplygin"])) < 1e-12


def test_chaplygin_relation_from_log_solution():
    u = C.log_ma(0.5)
    U, V = C.chaplygin_fields_from_ma(u)
    r = C.chaplygin_check(U, V, (2.0, 0.3), u=u)
    assert max(map(abs, r["chaplygin"])) < 1e-8
    assert r["utt_relation"] < 1e-12
    assert r["riemann"] < 1e-8


def test_worst_treats_nan_as_infinite():
    assert C._worst(0.0, float("nan"), 1.0) == math.inf
    assert C._worst(0.5, 1e-3) == 0.5
