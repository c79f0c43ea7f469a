"""Checks for the web of equivalent forms: Born-Infeld, Riemann invariants,
Monge-Ampere, the Bianchi map, the half-Legendre transform and the Chaplygin gas.

Fields are :class:`FieldCandidate` objects in (x, t), or in (s, y) for the
half-Legendre transform. Derived fields (R+-, U, V) evaluate partials of the
field they come from, so registering analytic derivatives on the source
keeps the outer differences clean.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .calculus import DiffConfig, FieldCandidate, JetCache, partial
from .specfun import DomainError


class InvertibilityError(ValueError):
    """z = u_s cannot be inverted for s on the patch."""


def _jet(f: FieldCandidate, point, cfg: DiffConfig):
    c = JetCache(point, cfg)
    names = {"x": (1, 0), "t": (0, 1), "xx": (2, 0), "xt": (1, 1), "tt": (0, 2)}
    return {k: complex(c(f, mi)).real for k, mi in names.items()}


def born_infeld_from_jet(j) -> float:
    return (1 + j["x"] ** 2) * j["tt"] - 2 * j["x"] * j["t"] * j["xt"] - (1 - j["t"] ** 2) * j["xx"]


def born_infeld_residual(phi: FieldCandidate, point, cfg: DiffConfig = DiffConfig()) -> float:
    """(1 + phi_x^2) phi_tt - 2 phi_x phi_t phi_xt - (1 - phi_t^2) phi_xx."""
    return born_infeld_from_jet(_jet(phi, point, cfg))


def minimal_surface_from_jet(j) -> float:
    """Numerator of the divergence-form minimal surface equation in (x, y); t plays y."""
    return (1 + j["t"] ** 2) * j["xx"] - 2 * j["x"] * j["t"] * j["xt"] + (1 + j["x"] ** 2) * j["tt"]


def _worst(*vals) -> float:
    """max() that treats NaN as infinitely bad."""
    return max(v if math.isfinite(v) else math.inf for v in vals)


def wick_rotate_jet(j) -> dict:
    """Jet in (x, y) seen from (x, t) with y = i t: d_y = -i d_t."""
    return {"x": j["x"], "t": -1j * j["t"], "xx": j["xx"], "xt": -1j * j["xt"], "tt": -j["tt"]}


def wick_check(rng: np.random.Generator, n: int = 100) -> float:
    """Largest |MS(rotated jet) + BI(jet)| over random second-order jets."""
    worst = 0.0
    for _ in range(n):
        j = dict(zip(("x", "t", "xx", "xt", "tt"), rng.normal(size=5)))
        worst = _worst(worst, abs(minimal_surface_from_jet(wick_rotate_jet(j)) + born_infeld_from_jet(j)))
    return worst


# ------------------------------------------------------------ Riemann invariants


def riemann_values(px: float, pt: float):
    rad = 1 + px * px - pt * pt
    if rad < 0:
        raise DomainError(f"1 + phi_x^2 - phi_t^2 = {rad} < 0")
    root = math.sqrt(rad) / (1 + px * px)
    cross = px * pt / (1 + px * px)
    return root + cross, -root + cross


def riemann_from_phi(phi: FieldCandidate, point, cfg: DiffConfig = DiffConfig()):
    """R+- = +-(1 + phi_x^2 - phi_t^2)^(1/2) / (1 + phi_x^2) + phi_x phi_t / (1 + phi_x^2)."""
    c = JetCache(point, cfg)
    return riemann_values(complex(c(phi, (1, 0))).real, complex(c(phi, (0, 1))).real)


def riemann_fields(phi: FieldCandidate, cfg: DiffConfig = DiffConfig()):
    def comp(k):
        return lambda x, t: riemann_from_phi(phi, (x, t), cfg)[k]

    return FieldCandidate(comp(0), label="R+"), FieldCandidate(comp(1), label="R-")


def riemann_residual(Rp: FieldCandidate, Rm: FieldCandidate, point, cfg: DiffConfig = DiffConfig()):
    """(R+_t - R- R+_x, R-_t - R+ R-_x)."""
    c = JetCache(point, cfg)
    rp, rm = c(Rp), c(Rm)
    return c(Rp, (0, 1)) - rm * c(Rp, (1, 0)), c(Rm, (0, 1)) - rp * c(Rm, (1, 0))


# ------------------------------------------------------------ Monge-Ampere


def monge_ampere_residual(u: FieldCandidate, point, cfg: DiffConfig = DiffConfig()) -> float:
    """u_xx u_tt - u_xt^2 + 1."""
    j = _jet(u, point, cfg)
    return j["xx"] * j["tt"] - j["xt"] ** 2 + 1


def ma_to_riemann(uxx, uxt):
    if uxx == 0:
        raise DomainError("u_xx = 0")
    return (uxt + 1) / uxx, (uxt - 1) / uxx


def riemann_to_ma(rp, rm):
    """(u_xx, u_xt, u_tt) from R+-."""
    if rp == rm:
        raise DomainError("R+ = R- leaves the inverse relations undefined")
    d = rp - rm
    return 2 / d, (rp + rm) / d, 2 * rp * rm / d


def ma_riemann_fields(u: FieldCandidate, cfg: DiffConfig = DiffConfig()):
    def comp(k):
        return lambda x, t: ma_to_riemann(partial(u, (x, t), (2, 0), cfg), partial(u, (x, t), (1, 1), cfg))[k]

    return FieldCandidate(comp(0), label="R+[u]"), FieldCandidate(comp(1), label="R-[u]")


def ma_riemann_roundtrip(u: FieldCandidate, point, cfg: DiffConfig = DiffConfig()) -> dict:
    """Forward map to R+-, inverse back to second derivatives, and the Riemann system on the derived pair."""
    j = _jet(u, point, cfg)
    rp, rm = ma_to_riemann(j["xx"], j["xt"])
    back = riemann_to_ma(rp, rm)
    gap = max(abs(back[0] - j["xx"]), abs(back[1] - j["xt"]), abs(back[2] - j["tt"]))
    Rp, Rm = ma_riemann_fields(u, cfg)
    sys = riemann_residual(Rp, Rm, point, cfg)
    return {
        "R": (rp, rm),
        "roundtrip_gap": gap,
        "monge_ampere": monge_ampere_residual(u, point, cfg),
        "riemann": max(abs(sys[0]), abs(sys[1])),
    }


# ------------------------------------------------------------ Bianchi map


def bianchi(px: float, pt: float) -> dict:
    """The three printed slots; the display names the first and third both u_tt."""
    rad = 1 - pt * pt + px * px
    if rad <= 0:
        raise DomainError(f"1 - phi_t^2 + phi_x^2 = {rad} <= 0")
    r = math.sqrt(rad)
    return {"first": (pt * pt - 1) / r, "xt": px * pt / r, "third": (px * px + 1) / r}


def bianchi_check(phi: FieldCandidate, point, cfg: DiffConfig = DiffConfig()) -> dict:
    """Both readings of the Bianchi display.

    Reading ``third_is_uxx`` takes the third slot as u_xx and the first as
    u_tt, then evaluates the Monge-Ampere residual. Reading ``verbatim``
    takes both slots as u_tt and reports how far apart they are.
    """
    c = JetCache(point, cfg)
    b = bianchi(complex(c(phi, (1, 0))).real, complex(c(phi, (0, 1))).real)
    return {
        "third_is_uxx": b["third"] * b["first"] - b["xt"] ** 2 + 1,
        "verbatim": abs(b["first"] - b["third"]),
        "slots": b,
    }


# ------------------------------------------------------------ half-Legendre


def _invert(us, z, s0, bracket, tol=1e-14):
    """Solve u_s(s) = z by Newton from s0, falling back to bisection on ``bracket``."""
    s = s0
    for _ in range(50):
        f = us(s) - z
        h = 1e-6 * max(1.0, abs(s))
        d = (us(s + h) - us(s - h)) / (2 * h)
        if d == 0 or not math.isfinite(d):
            break
        step = f / d
        s_new = s - step
        if not bracket[0] <= s_new <= bracket[1]:
            break
        s = s_new
        if abs(step) <= tol * max(1.0, abs(s)):
            return s
    lo, hi = bracket
    flo, fhi = us(lo) - z, us(hi) - z
    if flo * fhi > 0:
        raise InvertibilityError(f"z = {z} outside the range of u_s on {bracket}")
    return brentq(lambda v: us(v) - z, lo, hi, xtol=1e-15, rtol=1e-15)


def half_legendre(u: FieldCandidate, bracket, cfg: DiffConfig = DiffConfig(), samples: int = 33) -> FieldCandidate:
    """u~(z, y) = u(s, y) - s u_s(s, y) with z = u_s, inverted numerically for s.

    ``bracket`` is the s-interval of the patch; u_s must be strictly
    monotone there (checked on a sample grid for each y).
    """
    lo, hi = bracket

    def u_s(s, y):
        return complex(partial(u, (s, y), (1, 0), cfg)).real

    checked = {}

    def monotone(y):
        if y not in checked:
            vals = np.array([u_s(s, y) for s in np.linspace(lo, hi, samples)])
            d = np.diff(vals)
            checked[y] = bool(np.all(d > 0) or np.all(d < 0))
        return checked[y]

    def ut(z, y):
        if not monotone(y):
            raise InvertibilityError(f"u_s is not strictly monotone in s on {bracket} at y = {y}")
        s = _invert(lambda v: u_s(v, y), z, 0.5 * (lo + hi), bracket)
        return complex(u.eval(s, y)).real - s * z

    return FieldCandidate(ut, label=f"halfLegendre[{u.label}]")


def wave_residual(ut: FieldCandidate, point, cfg: DiffConfig = DiffConfig()) -> float:
    """u~_yy - u~_zz at (z, y)."""
    c = JetCache(point, cfg)
    return complex(c(ut, (0, 2)) - c(ut, (2, 0))).real


# ------------------------------------------------------------ Chaplygin gas


def chaplygin_residual(U: FieldCandidate, V: FieldCandidate, point, cfg: DiffConfig = DiffConfig()):
    """(U_t - 1/2 (U^2 - V^-2)_x, V_t - (UV)_x)."""
    c = JetCache(point, cfg)
    u, v = complex(c(U)).real, complex(c(V)).real
    if v == 0:
        raise DomainError("V = 0")
    ux, ut = complex(c(U, (1, 0))).real, complex(c(U, (0, 1))).real
    vx, vt = complex(c(V, (1, 0))).real, complex(c(V, (0, 1))).real
    return ut - (u * ux + vx / v**3), vt - (ux * v + u * vx)


def riemann_to_chaplygin(rp, rm):
    """(U, V) with R+- = U +- 1/V."""
    if rp == rm:
        raise DomainError("R+ = R- gives 1/V = 0")
    return 0.5 * (rp + rm), 2 / (rp - rm)


def chaplygin_fields_from_ma(u: FieldCandidate, cfg: DiffConfig = DiffConfig()):
    def U(x, t):
        uxx = partial(u, (x, t), (2, 0), cfg)
        if uxx == 0:
            raise DomainError("u_xx = 0")
        return partial(u, (x, t), (1, 1), cfg) / uxx

    return FieldCandidate(U, label="U[u]"), FieldCandidate(lambda x, t: partial(u, (x, t), (2, 0), cfg), label="V[u]")


def chaplygin_fields_from_riemann(Rp: FieldCandidate, Rm: FieldCandidate):
    U = FieldCandidate(lambda x, t: riemann_to_chaplygin(Rp.eval(x, t), Rm.eval(x, t))[0], label="U[R]")
    V = FieldCandidate(lambda x, t: riemann_to_chaplygin(Rp.eval(x, t), Rm.eval(x, t))[1], label="V[R]")
    return U, V


def chaplygin_check(U: FieldCandidate, V: FieldCandidate, point, cfg: DiffConfig = DiffConfig(), u: FieldCandidate | None = None) -> dict:
    """Conservation-law residuals plus the relation audits.

    The R+- = U +- 1/V pair is checked against the Riemann system; when the
    Monge-Ampere potential ``u`` is given, u_tt = U^2 V - 1/V is checked too.
    """
    res = chaplygin_residual(U, V, point, cfg)
    Rp = FieldCandidate(lambda x, t: U.eval(x, t) + 1 / V.eval(x, t), label="U+1/V")
    Rm = FieldCandidate(lambda x, t: U.eval(x, t) - 1 / V.eval(x, t), label="U-1/V")
    rr = riemann_residual(Rp, Rm, point, cfg)
    out = {"chaplygin": (res[0], res[1]), "riemann": max(abs(rr[0]), abs(rr[1]))}
    if u is not None:
        uu, vv = complex(U.eval(*point)).real, complex(V.eval(*point)).real
        out["utt_relation"] = abs(partial(u, point, (0, 2), cfg) - (uu * uu * vv - 1 / vv))
    return out


# ------------------------------------------------------------ reference fields


def travelling_wave(f, df, d2f, direction: int = 1) -> FieldCandidate:
    """phi = f(x - direction*t) with analytic derivatives up to order two."""
    a = -direction
    return FieldCandidate(
        lambda x, t: f(x + a * t),
        {
            (1, 0): lambda x, t: df(x + a * t),
            (0, 1): lambda x, t: a * df(x + a * t),
            (2, 0): lambda x, t: d2f(x + a * t),
            (1, 1): lambda x, t: a * d2f(x + a * t),
            (0, 2): lambda x, t: d2f(x + a * t),
        },
        f"wave({direction})",
    )


def quadratic_ma() -> FieldCandidate:
    """u = (x^2 - t^2)/2."""
    return FieldCandidate(
        lambda x, t: 0.5 * (x * x - t * t),
        {(1, 0): lambda x, t: x, (0, 1): lambda x, t: -t, (2, 0): lambda x, t: 1.0, (1, 1): lambda x, t: 0.0,
         (0, 2): lambda x, t: -1.0},
        "(x^2-t^2)/2",
    )


def log_ma(b: float = 0.5) -> FieldCandidate:
    """u = 2w ln w - 2w + xt + b t^2 with w = x + bt - b > 0; R+ = x + bt and R- = b."""

    def w(x, t):
        v = x + b * t - b
        if v <= 0:
            raise DomainError("x + bt - b must be positive")
        return v

    return FieldCandidate(
        lambda x, t: 2 * w(x, t) * math.log(w(x, t)) - 2 * w(x, t) + x * t + b * t * t,
        {
            (1, 0): lambda x, t: 2 * math.log(w(x, t)) + t,
            (0, 1): lambda x, t: 2 * b * math.log(w(x, t)) + x + 2 * b * t,
            (2, 0): lambda x, t: 2 / w(x, t),
            (1, 1): lambda x, t: (x + b * t + b) / w(x, t),
            (0, 2): lambda x, t: 2 * (x + b * t) * b / w(x, t),
        },
        f"logMA(b={b})",
    )


def web_check(points, cfg: DiffConfig = DiffConfig(), seed: int = 0) -> dict:
    """Every map in the web on the reference fields; each entry is a worst-case residual."""
    waves = [
        travelling_wave(math.sin, math.cos, lambda s: -math.sin(s), 1),
        travelling_wave(lambda s: 0.5 * math.tanh(s), lambda s: 0.5 / math.cosh(s) ** 2,
                        lambda s: -math.tanh(s) / math.cosh(s) ** 2, -1),
    ]
    mas = [quadratic_ma(), log_ma(0.5)]
    out = {k: 0.0 for k in ("born_infeld", "riemann_from_phi", "bianchi_uxx", "ma_roundtrip", "ma_riemann",
                            "monge_ampere", "chaplygin", "chaplygin_riemann", "utt_relation", "half_legendre")}
    verbatim = 0.0
    x0 = min(p[0] for p in points)
    for pt in points:
        for phi in waves:
            out["born_infeld"] = _worst(out["born_infeld"], abs(born_infeld_residual(phi, pt, cfg)))
            rp, rm = riemann_fields(phi, cfg)
            out["riemann_from_phi"] = _worst(out["riemann_from_phi"], *map(abs, riemann_residual(rp, rm, pt, cfg)))
            b = bianchi_check(phi, pt, cfg)
            out["bianchi_uxx"] = _worst(out["bianchi_uxx"], abs(b["third_is_uxx"]))
            verbatim = _worst(verbatim, b["verbatim"])
            U, V = chaplygin_fields_from_riemann(rp, rm)
            try:
                ch = chaplygin_check(U, V, pt, cfg)
            except DomainError:
                continue
            out["chaplygin"] = _worst(out["chaplygin"], *map(abs, ch["chaplygin"]))
            out["chaplygin_riemann"] = _worst(out["chaplygin_riemann"], ch["riemann"])
        for u in mas:
            shifted = (pt[0] - x0 + 1.5 - 0.5 * pt[1], pt[1])  # x + t/2 - 1/2 >= 1 for the log solution
            r = ma_riemann_roundtrip(u, shifted, cfg)
            out["ma_roundtrip"] = _worst(out["ma_roundtrip"], r["roundtrip_gap"])
            out["ma_riemann"] = _worst(out["ma_riemann"], r["riemann"])
            out["monge_ampere"] = _worst(out["monge_ampere"], abs(r["monge_ampere"]))
            U, V = chaplygin_fields_from_ma(u, cfg)
            ch = chaplygin_check(U, V, shifted, cfg, u)
            out["chaplygin"] = _worst(out["chaplygin"], *map(abs, ch["chaplygin"]))
            out["chaplygin_riemann"] = _worst(out["chaplygin_riemann"], ch["riemann"])
            out["utt_relation"] = _worst(out["utt_relation"], ch["utt_relation"])
    for u, bracket in ((quadratic_ma(), (-3.0, 3.0)), (log_ma(0.5), (1.2, 4.0))):
        ut = half_legendre(u, bracket, cfg)
        for y in (-0.3, 0.0, 0.4):
            for s in (1.5, 2.0, 2.5):
                z = complex(partial(u, (s, y), (1, 0), cfg)).real
                out["half_legendre"] = _worst(out["half_legendre"], abs(wave_residual(ut, (z, y), cfg)))
    out["wick"] = wick_check(np.random.default_rng(seed))
    return {"residuals": out, "bianchi_verbatim_gap": verbatim}
