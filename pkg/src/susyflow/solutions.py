"""Closed-form solution catalog with builders, residual gates and listings.

Each entry builds an :class:`Instance`: the subalgebra row it belongs to,
the reduced functions or full-plane fields, and a sampling domain.
:func:`verify` runs the entry's residual check. Entries defined through an
integral (Lambert, the elliptic Lambda) are also checked at the ODE level,
where the integrand enters directly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from . import pde, reductions, symmetry
from .calculus import DiffConfig, FieldCandidate, JetCache, RegistrationError, StencilError, curve, dcurve
from .grassmann import GeneratorSet, GrassmannNumber, Parity, g_log, g_solve_implicit
from .reductions import ReducedCandidate, SubalgebraSpec
from .specfun import ellip_F_minus_E, gauss_kronrod, lambert_w
from .superfield import standard_context


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    anchor: str
    row: str
    epsilon: int
    defaults: dict
    domain: str
    classification: str = "exact"  # exact | verbatim-suspect
    level: str = "lift"  # lift | classical | reduced | ode | omega | density
    builder: Callable | None = None
    constraints: Callable | None = None
    notes: str = ""


@dataclass
class Instance:
    entry: CatalogEntry
    params: dict
    ctx: GeneratorSet
    spec: SubalgebraSpec | None = None
    rc: ReducedCandidate | None = None
    phi: FieldCandidate | None = None
    psi: FieldCandidate | None = None
    points: list = field(default_factory=list)
    xis: list = field(default_factory=list)
    exclude: Callable | None = None
    check: Callable | None = None  # custom residual (cfg) -> dict
    variants: dict = field(default_factory=dict)
    diff: dict = field(default_factory=dict)  # DiffConfig overrides for steep entries

    @property
    def fields(self):
        if self.phi is None and self.spec is not None and self.rc is not None:
            self.phi, self.psi = reductions.lift(self.spec, self.rc)
        return self.phi, self.psi


CATALOG: dict[str, CatalogEntry] = {}


def _entry(**kw):
    def deco(fn):
        CATALOG[kw["id"]] = CatalogEntry(builder=fn, **kw)
        return fn

    return deco


def _grid(xr, yr, n):
    return reductions.grid(xr[0], xr[1], n, yr[0], yr[1], n)


def _xi_grid(a, b, n=9):
    return [float(v) for v in np.linspace(a, b, n)]


# ------------------------------------------------------------ closed forms


def kink_F(xi, C1=0.0, s=1):
    return math.sqrt(1 + xi * xi) * (s * math.atan(xi) + C1)


def kink_dF(xi, C1=0.0, s=1):
    a = s * math.atan(xi) + C1
    return (xi * a + s) / math.sqrt(1 + xi * xi)


def kink_d2F(xi, C1=0.0, s=1):
    a = s * math.atan(xi) + C1
    return (a + 2 * s * xi / (1 + xi * xi) - xi * (xi * a + s) / (1 + xi * xi)) / math.sqrt(1 + xi * xi)


def kink_field(C1=0.0, s=1) -> FieldCandidate:
    """phi = yF(x/y) with analytic first derivatives phi_x = F', phi_y = F - xi F'."""

    def phi(x, y):
        return y * kink_F(x / y, C1, s)

    def px(x, y):
        return kink_dF(x / y, C1, s)

    def py(x, y):
        xi = x / y
        return kink_F(xi, C1, s) - xi * kink_dF(xi, C1, s)

    return FieldCandidate(phi, {(1, 0): px, (0, 1): py}, f"kink(C1={C1})")


def kink_lambda(xi, C1, s=1):
    a = s * math.atan(xi) + C1
    t = math.atan(xi)
    return (1 + xi * xi) ** 0.75 * a**0.75 * math.exp(-(s * 0.75 * C1 + 0.375 * t) * t)


def linear_lambda(xi, C1, C2):
    """The epsilon = 1 ratio; both bases must be positive on the domain."""
    num = (C2 * C2 - 1) * xi * xi - 2 * C1 * C2 * xi + (C1 * C1 - 1)
    den = (1 - C2 * C2) * xi + C1 * C2 + math.sqrt(C1 * C1 + C2 * C2 - 1)
    return num**1.5 / den**1.5


def elliptic_F(xi, C1=1.0, s=1):
    """C1 sqrt(xi-1) sqrt(xi+1) +- sqrt(-1-xi^2)/(1+xi^2) (xi + xi^3 + sqrt(1-xi^2) sqrt(1+xi^2) (F - E)), principal roots."""
    z = complex(xi)
    d = ellip_F_minus_E(z, 1j)
    r = cmath.sqrt
    return C1 * r(z - 1) * r(z + 1) + s * r(-1 - z * z) / (1 + z * z) * (z + z**3 + r(1 - z * z) * r(1 + z * z) * d)


def elliptic_lambda_rate(xi, C1=1.0, variant="corrected"):
    """Logarithmic derivative Lambda'/Lambda of the epsilon = -1 elliptic Lambda.

    ``verbatim`` keeps the printed constant +1 in (1 + C1^2 + xi^2 + d^2);
    ``corrected`` uses -1 there. In both readings the stray coordinate in
    the last denominator term is read as xi.
    """
    one = 1.0 if variant == "verbatim" else -1.0
    z = complex(xi)
    d = ellip_F_minus_E(z, 1j)
    r = cmath.sqrt
    s1, s2, q, w, P = r(z - 1), r(z + 1), r((-z - 1) * (z - 1)), r(-1 - z * z), 1 + z * z
    num = C1 * d * (2 * z**10 + 6 * z**8 + 4 * z**6 - 4 * z**4 - 6 * z**2 - 2) + w * P**3.5 * s1 * s2 * q * (one + C1 * C1 + z * z + d * d)
    den = (z - 1) * (z + 1) * (-d * w * s1 * s2 * P**4 + C1 * P**4.5 * q + z * w * P**3.5 * s1 * s2 * q)
    return 0.75 * num / den


def hyperbolic_g(xi, C1, C2):
    return (3 * C1 * C1 * C2 * C2 - C2 * C2 - C1 * C1 - 1 + 6 * C1 * C2 * xi + 6 * C2**3 * C1 * xi
            + 6 * C2 * C2 * xi * xi + 3 * C2**4 * xi * xi + 3 * xi * xi)


def hyperbolic_rate(xi, C1, C2):
    """Integrand of the hyperbolic phase."""
    p2 = 1 + C1 * C1 + 2 * C1 * C2 * xi + xi * xi + C2 * C2 * xi * xi
    return 3 * math.sqrt(p2) * (1 + C2 * C2) ** 2 / (2 * math.sqrt(1 + C2 * C2) * hyperbolic_g(xi, C1, C2))


def hyperbolic_lambda_residual(lam, xi, C1, C2, cfg=DiffConfig()):
    """(1+C1^2+2C1C2 xi+xi^2+C2^2 xi^2) L'' + (-C2^2 xi - xi - C1C2) L' + 3/4 (1+C2^2) L."""
    L0, L1, L2 = lam.eval(xi, 0.0), dcurve(lam, xi, 1, cfg), dcurve(lam, xi, 2, cfg)
    return (1 + C1 * C1 + 2 * C1 * C2 * xi + xi * xi + C2 * C2 * xi * xi) * L2 + (-C2 * C2 * xi - xi - C1 * C2) * L1 + 0.75 * (1 + C2 * C2) * L0


def lambert_dphi(xi, C1, s=1):
    """phi_xi = +-(i/2) sqrt(L(-4 C1^2/xi)/xi), principal branch of L on the complex plane."""
    L = lambert_w(complex(-4 * C1 * C1 / xi), 0)
    return s * 0.5j * cmath.sqrt(L / xi)


def lambert_d2phi(xi, C1, s=1):
    L = lambert_w(complex(-4 * C1 * C1 / xi), 0)
    w = s * 0.5j * cmath.sqrt(L / xi)
    return -w * (2 + L) / (2 * xi * (1 + L))


def l8_slope(m, n, epsilon, sign=1):
    return (m + sign * n * cmath.sqrt(epsilon * (m * m + n * n))) / (m * m + epsilon * n * n)


def _real_if_close(v):
    return v.real if isinstance(v, complex) and v.imag == 0 else v


# ------------------------------------------------------------ antiderivatives on demand


class _Antiderivative:
    """I(xi) = integral from xi0 of rate.

    Panels between lattice nodes xi0 + k*step are memoised, and each value
    integrates from its nearest node, so results do not depend on call order.
    """

    def __init__(self, rate, xi0, step=0.05):
        self.rate = np.vectorize(rate, otypes=[complex])
        self.xi0, self.step = float(xi0), step
        self.nodes = {0: 0.0}

    def _node(self, k):
        if k not in self.nodes:
            j = k - 1 if k > 0 else k + 1
            a, b = self.xi0 + j * self.step, self.xi0 + k * self.step
            self.nodes[k] = self._node(j) + gauss_kronrod(self.rate, a, b, tol=1e-14)
        return self.nodes[k]

    def __call__(self, xi):
        k = round((float(xi) - self.xi0) / self.step)
        a = self.xi0 + k * self.step
        return self._node(k) + gauss_kronrod(self.rate, a, float(xi), tol=1e-14)


# ------------------------------------------------------------ arbitrary odd profiles

PROFILES = {
    "soliton": (lambda t: 1 / math.cosh(t) ** 2, "E1"),
    "kink": (lambda t: math.tanh(t), "f1"),
    "periodic": (lambda t: math.sin(2 * t) + 0.5 * math.cos(t), "f2"),
}


def odd_profile(name, ctx, scale=1.0):
    fn, gen = PROFILES[name]
    g = ctx.gen(gen)
    return lambda t: (scale * fn(t)) * g


# ------------------------------------------------------------ classical entries


@_entry(id="kink", anchor="kink potential for the dilation reduction", row="classical-eps1:L4", epsilon=1,
        defaults={"C1": 0.0, "s": 1}, domain="y in [0.5, 2.5], x in [-2, 2]", level="classical")
def _kink(p, ctx):
    C1, s = p["C1"], p["s"]
    spec = SubalgebraSpec("classical-eps1:L4", 1)
    rc = reductions.reduced(lambda t: kink_F(t, C1, s), None, {1: lambda t: kink_dF(t, C1, s), 2: lambda t: kink_d2F(t, C1, s)}, label="kink")
    return Instance(CATALOG["kink"], p, ctx, spec, rc, kink_field(C1, s), None,
                    points=_grid((-2, 2), (0.5, 2.5), 20), xis=_xi_grid(-3, 3))


@_entry(id="density_kink", anchor="kink density and velocity", row="classical-eps1:L4", epsilon=1,
        defaults={"C1": 0.0}, domain="y > 0", level="density")
def _density_kink(p, ctx):
    C1 = p["C1"]
    return Instance(CATALOG["density_kink"], p, ctx, phi=kink_field(C1, 1), points=_grid((-2, 2), (0.5, 2.5), 8))


def kink_density(x, y, C1=0.0):
    return math.exp(-(1 + (math.atan(x / y) + C1) ** 2))


def kink_velocity(x, y, C1=0.0):
    r = math.hypot(x, y)
    a = math.atan(x / y) + C1
    return x / r * a + y / r, y / r * a - x / r


def _linear_rc(C1, C2):
    return reductions.reduced(lambda t: C1 * t + C2, None, {1: lambda t: C1, 2: lambda t: 0.0}, label="linear")


@_entry(id="linear", anchor="linear reduced solution", row="classical-eps1:L4", epsilon=1,
        defaults={"C1": 1.0, "C2": 0.0, "epsilon": 1}, domain="y in [0.5, 2.5]", level="classical")
def _linear(p, ctx):
    eps = p.get("epsilon", 1)
    row = "classical-eps1:L4" if eps == 1 else "classical-eps-1:S"
    spec = SubalgebraSpec(row, eps)
    rc = _linear_rc(p["C1"], p["C2"])
    phi, _ = reductions.lift(spec, rc)
    return Instance(CATALOG["linear"], p, ctx, spec, rc, phi, None, points=_grid((-2, 2), (0.5, 2.5), 20), xis=_xi_grid(-3, 3))


@_entry(id="elliptic", anchor="elliptic potential for the epsilon = -1 dilation reduction", row="classical-eps-1:S",
        epsilon=-1, defaults={"C1": 1.0, "s": 1}, domain="|x/y| <= 0.8, y in [1, 2]", level="classical",
        notes="complex-valued; for large C1 the imaginary part is bump-like (metadata only)")
def _elliptic(p, ctx):
    C1, s = p["C1"], p["s"]
    spec = SubalgebraSpec("classical-eps-1:S", -1)
    rc = reductions.reduced(lambda t: elliptic_F(t, C1, s), label="elliptic")
    phi, _ = reductions.lift(spec, rc)
    return Instance(CATALOG["elliptic"], p, ctx, spec, rc, phi, None, points=_grid((-0.8, 0.8), (1.0, 2.0), 20),
                    xis=_xi_grid(-0.9, 0.9), diff={"levels": 3})


@_entry(id="lambert", anchor="Lambert-function potential for the rotation reduction", row="classical-eps1:L5",
        epsilon=1, defaults={"C1": 0.3, "s": 1}, domain="xi in [0.1, 5]", level="reduced",
        notes="attached to the rotation reduction, where its residual vanishes")
def _lambert(p, ctx):
    C1, s = p["C1"], p["s"]
    spec = SubalgebraSpec("classical-eps1:L5", 1)
    anti = _Antiderivative(lambda t: lambert_dphi(float(t), C1, s), 1.0)
    rc = reductions.reduced(anti, None, {1: lambda t: lambert_dphi(t, C1, s), 2: lambda t: lambert_d2phi(t, C1, s)}, label="lambert")
    return Instance(CATALOG["lambert"], p, ctx, spec, rc, xis=_xi_grid(0.1, 5.0, 50))


# ------------------------------------------------------------ supersymmetric entries


@_entry(id="susy_kink", anchor="kink with fermionic partner", row="L1", epsilon=1,
        defaults={"C1": 2.0, "s": 1}, domain="y in [0.5, 2.5], x in [-2, 2], s arctan(x/y) + C1 > 0")
def _susy_kink(p, ctx):
    C1, s = p["C1"], p["s"]
    E1 = ctx.gen("E1")
    rc = reductions.reduced(lambda t: kink_F(t, C1, s), lambda t: kink_lambda(t, C1, s) * E1,
                            {1: lambda t: kink_dF(t, C1, s), 2: lambda t: kink_d2F(t, C1, s)}, label="susy-kink")
    return Instance(CATALOG["susy_kink"], p, ctx, SubalgebraSpec("L1", 1), rc, points=_grid((-2, 2), (0.5, 2.5), 10),
                    xis=_xi_grid(-3, 3), exclude=lambda x, y: s * math.atan(x / y) + C1 <= 0.05)


@_entry(id="susy_linear", anchor="linear F with the fermionic ratio", row="L1", epsilon=1,
        defaults={"C1": 1.5, "C2": 0.5}, domain="x/y in [-1, 0.5], y in [1, 2]; needs C1^2 + C2^2 > 1")
def _susy_linear(p, ctx):
    C1, C2 = p["C1"], p["C2"]
    if C1 * C1 + C2 * C2 <= 1:
        raise ValueError("susy_linear needs C1^2 + C2^2 > 1")
    E1 = ctx.gen("E1")
    rc = reductions.reduced(lambda t: C1 * t + C2, lambda t: linear_lambda(t, C1, C2) * E1,
                            {1: lambda t: C1, 2: lambda t: 0.0}, label="susy-linear")
    return Instance(CATALOG["susy_linear"], p, ctx, SubalgebraSpec("L1", 1), rc, points=_grid((-1, 0.5), (1, 2), 10),
                    xis=_xi_grid(-1, 0.5))


@_entry(id="susy_elliptic", anchor="elliptic F with exponential-integral Lambda", row="L1", epsilon=-1,
        defaults={"C1": 0.7, "variant": "corrected"}, domain="|x/y| <= 0.6, y in [1, 2]",
        classification="verbatim-suspect",
        notes="pairs with the + branch of F; the printed integrand needs -1 in place of +1")
def _susy_elliptic(p, ctx):
    C1, variant = p["C1"], p["variant"]
    E1 = ctx.gen("E1")
    rate = lambda t: elliptic_lambda_rate(float(t), C1, variant)
    anti = _Antiderivative(rate, 0.0)
    rc = reductions.reduced(lambda t: elliptic_F(t, C1, 1), lambda t: cmath.exp(anti(t)) * E1, label="susy-elliptic")
    inst = Instance(CATALOG["susy_elliptic"], p, ctx, SubalgebraSpec("L1", -1), rc,
                    points=_grid((-0.5, 0.5), (1.0, 1.6), 4), xis=_xi_grid(-0.8, 0.8), diff={"levels": 3})
    inst.check = lambda cfg: _elliptic_ode_check(inst, cfg)
    return inst


def _elliptic_ode_check(inst, cfg):
    """Fermionic L1 reduction divided by Lambda, with Lambda'/Lambda given by the integrand."""
    out = {}
    spec = inst.spec
    for variant in ("verbatim", "corrected"):
        C1 = inst.params["C1"]
        F = curve(lambda t: elliptic_F(t, C1, 1))
        I = curve(lambda t: elliptic_lambda_rate(t, C1, variant))
        worst = 0.0
        for xi in inst.xis:
            i1, i2 = I.eval(xi, 0.0), dcurve(I, xi, 1, cfg)
            v = {"F0": F.eval(xi, 0.0), "F1": dcurve(F, xi, 1, cfg), "F2": dcurve(F, xi, 2, cfg),
                 "L0": 1.0, "L1": i1, "L2": i2 + i1 * i1}
            worst = max(worst, abs(reductions.ROWS["L1"].reduced(v, xi, spec)[1]))
        out[variant] = worst
    return out


@_entry(id="susy_elliptic_bare", anchor="elliptic F with vanishing fermion", row="L1", epsilon=-1,
        defaults={"C1": 1.0, "s": 1}, domain="|x/y| <= 0.8, y in [1, 2]")
def _susy_elliptic_bare(p, ctx):
    rc = reductions.reduced(lambda t: elliptic_F(t, p["C1"], p["s"]), None, label="elliptic")
    return Instance(CATALOG["susy_elliptic_bare"], p, ctx, SubalgebraSpec("L1", -1), rc,
                    points=_grid((-0.8, 0.8), (1.0, 2.0), 8), xis=_xi_grid(-0.9, 0.9), diff={"levels": 3})


@_entry(id="susy_hyperbolic", anchor="hyperbolic fermionic partner of linear F", row="L1", epsilon=-1,
        defaults={"C1": 0.5, "C2": 0.3, "c3": 0.4}, domain="x/y in [1, 4] (g > 0), y in [0.5, 1]",
        notes="C3 = c3*E1 and C4 = E1 keep C3 C4 = 0, which the decoupling condition requires")
def _susy_hyperbolic(p, ctx):
    C1, C2, c3 = p["C1"], p["C2"], p["c3"]
    E1 = ctx.gen("E1")
    rate = lambda t: hyperbolic_rate(float(t), C1, C2)
    anti = _Antiderivative(rate, 2.0)

    def profile(t):
        I = anti(t).real
        return math.sqrt(hyperbolic_g(t, C1, C2)) * (c3 * math.sinh(I) + math.cosh(I))

    rc = reductions.reduced(lambda t: C1 * t + C2, lambda t: profile(t) * E1, {1: lambda t: C1, 2: lambda t: 0.0},
                            label="susy-hyperbolic")
    inst = Instance(CATALOG["susy_hyperbolic"], p, ctx, SubalgebraSpec("L1", -1), rc,
                    points=_grid((1.0, 2.0), (0.5, 1.0), 6), xis=_xi_grid(1.0, 4.0),
                    exclude=lambda x, y: hyperbolic_g(x / y, C1, C2) <= 0.05)
    inst.check = lambda cfg: {"printed_lambda_equation": max(
        abs(hyperbolic_lambda_residual(curve(profile), xi, C1, C2, cfg)) for xi in inst.xis)}
    return inst


def _wave_rc(slope, C2, lam):
    return reductions.reduced(lambda t: slope * t + C2, lam, {1: lambda t: slope, 2: lambda t: 0.0}, label="wave")


@_entry(id="travelling_linear", anchor="linear travelling wave", row="L4,m", epsilon=1,
        defaults={"m": 2.0, "C1": 0.7, "C2": 0.1, "epsilon": 1}, domain="whole plane; sampled on [-1, 1]^2")
def _travelling_linear(p, ctx):
    K1, K2 = ctx.gens("K1", "K2")
    rc = _wave_rc(p["C1"], p["C2"], lambda t: t * K1 + K2)
    spec = SubalgebraSpec("L4,m", p.get("epsilon", 1), {"m": p["m"]})
    return Instance(CATALOG["travelling_linear"], p, ctx, spec, rc, points=_grid((-1, 1), (-1, 1), 6), xis=_xi_grid(-2, 2))


def _fixed_slope(row, eps, params, slope, profile, ctx, var_range=(-2, 2)):
    lam = odd_profile(profile, ctx)
    rc = _wave_rc(slope, 0.2, lam)
    spec = SubalgebraSpec(row, eps, params)
    return spec, rc


@_entry(id="fixed_slope", anchor="fixed-slope wave with arbitrary fermion", row="L4,m", epsilon=1,
        defaults={"row": "L4,m", "m": 2.0, "epsilon": 1, "sign": 1, "profile": "soliton"},
        domain="whole plane; sampled on [-1, 1]^2",
        notes="rows L2, L3, L4,m, L6,m, L7,m; profiles soliton, kink, periodic")
def _fixed_slope_entry(p, ctx):
    row, eps, m, sg = p["row"], p.get("epsilon", 1), p.get("m", 2.0), p.get("sign", 1)
    r = cmath.sqrt(eps)
    if row in ("L2", "L3"):
        slope, params = sg * r, {}
    elif row == "L4,m":
        slope, params = sg * cmath.sqrt(eps * (m * m + 1) / (m * m + eps) ** 2), {"m": m}
    elif row in ("L6,m", "L7,m"):
        slope, params = sg * m * r, {"m": m}
    else:
        raise ValueError(f"fixed_slope has no row {row}")
    spec, rc = _fixed_slope(row, eps, params, _real_if_close(slope), p["profile"], ctx)
    return Instance(CATALOG["fixed_slope"], p, ctx, spec, rc, points=_grid((-1, 1), (-1, 1), 6), xis=_xi_grid(-2, 2))


@_entry(id="l8_slope", anchor="specific propagation wave for Z+mP1+nP2", row="L8,m,n", epsilon=1,
        defaults={"m": 1.0, "n": 2.0, "epsilon": 1, "sign": 1, "profile": "periodic"},
        domain="whole plane; sampled on [-1, 1]^2", classification="verbatim-suspect",
        notes="the slope solves the reduced equation with the lift phi = F(xi) + y/n; the display omits y/n")
def _l8(p, ctx):
    m, n, eps = p["m"], p["n"], p.get("epsilon", 1)
    w = _real_if_close(l8_slope(m, n, eps, p.get("sign", 1)))
    lam = odd_profile(p["profile"], ctx)
    rc = _wave_rc(w, 0.2, lam)
    spec = SubalgebraSpec("L8,m,n", eps, {"m": m, "n": n})
    inst = Instance(CATALOG["l8_slope"], p, ctx, spec, rc, points=_grid((-1, 1), (-1, 1), 6), xis=_xi_grid(-2, 2))

    def verbatim(cfg):
        phi = FieldCandidate(lambda x, y: w * (x - m / n * y) + 0.2, label="verbatim")
        psi = FieldCandidate(lambda x, y: lam(x - m / n * y), label="psi", parity=Parity.ODD)
        worst = max(max(_mag(r) for r in pde.special_residuals(phi, psi, eps, pt, cfg)) for pt in inst.points[:6])
        lifted = max(max(_mag(r) for r in pde.special_residuals(*inst.fields, eps, pt, cfg)) for pt in inst.points[:6])
        return {"verbatim_without_y_over_n": worst, "with_y_over_n": lifted}

    inst.check = verbatim
    return inst


@_entry(id="quadratic_psi", anchor="quadratic fermion for P2+eta1Q1+eta2Q2", row="script-L3", epsilon=1,
        defaults={"C1": 0.4, "C2": 0.1, "epsilon": 1}, domain="whole plane; needs 1 - eps C1^2 != 0")
def _quadratic(p, ctx):
    C1, C2, eps = p["C1"], p["C2"], p.get("epsilon", 1)
    if 1 - eps * C1 * C1 == 0:
        raise ValueError("quadratic_psi needs 1 - eps C1^2 != 0")
    e1, e2, K1, K2 = ctx.gens("eta1", "eta2", "K1", "K2")
    q = -1 / (2 * (1 - eps * C1 * C1))
    rc = reductions.reduced(lambda t: C1 * t + C2, lambda t: (q * t * t) * e2 + t * K1 + K2,
                            {1: lambda t: C1, 2: lambda t: 0.0}, label="quadratic")
    spec = SubalgebraSpec("script-L3", eps, {}, e1, e2)
    return Instance(CATALOG["quadratic_psi"], p, ctx, spec, rc, points=_grid((-1, 1), (-1, 1), 6), xis=_xi_grid(-2, 2))


@_entry(id="script_l3_free", anchor="fixed slope for P2+eta1Q1 with eta2 = 0", row="script-L3", epsilon=1,
        defaults={"epsilon": 1, "sign": 1, "profile": "kink"}, domain="whole plane")
def _sl3_free(p, ctx):
    eps = p.get("epsilon", 1)
    slope = _real_if_close(p.get("sign", 1) * cmath.sqrt(eps))
    rc = _wave_rc(slope, 0.0, odd_profile(p["profile"], ctx))
    spec = SubalgebraSpec("script-L3", eps, {}, ctx.gen("eta1"), None)
    return Instance(CATALOG["script_l3_free"], p, ctx, spec, rc, points=_grid((-1, 1), (-1, 1), 6), xis=_xi_grid(-2, 2))


def omega_relation(y, C1, ctx):
    """The transcendental relation as a function of omega at fixed y."""
    ee = ctx.gen("eta1") * ctx.gen("eta2")
    return lambda w: 4 * (w * w * g_log(w)) - (4 * y) * (ee * w * w) + w**4 - 1 - (4 * C1) * (ee * w * w)


def omega_solution(y, C1, ctx):
    return g_solve_implicit(omega_relation(y, C1, ctx), 1.0, ctx)


def omega_derivative(y, C1, ctx):
    """d omega / dy by implicit differentiation of the relation."""
    w = omega_solution(y, C1, ctx)
    ee = ctx.gen("eta1") * ctx.gen("eta2")
    r_w = 8 * (w * g_log(w)) + 4 * w - (8 * y) * (ee * w) + 4 * w**3 - (8 * C1) * (ee * w)
    r_y = -4 * (ee * w * w)
    return -(r_y * r_w.inverse())


@_entry(id="transcendental_omega", anchor="transcendental omega relation", row="script-L2", epsilon=-1,
        defaults={"C1": 0.3}, domain="y in [-1, 1]", level="omega",
        notes="the body of omega is 1, so phi = y + (y + C1)^2 eta1 eta2 / 4 and Lambda'' = -eta1/2")
def _omega(p, ctx):
    C1 = p["C1"]
    e1, e2, K1, K2 = ctx.gens("eta1", "eta2", "K1", "K2")
    ee = e1 * e2
    omega = curve(lambda t: omega_solution(t, C1, ctx), {1: lambda t: omega_derivative(t, C1, ctx)}, "omega")
    rc = reductions.reduced(lambda t: t + (0.25 * (t + C1) ** 2) * ee, lambda t: (-0.25 * t * t) * e1 + t * K1 + K2,
                            {1: lambda t: omega_solution(t, C1, ctx), 2: lambda t: omega_derivative(t, C1, ctx)},
                            label="omega")
    spec = SubalgebraSpec("script-L2", -1, {}, e1, e2)
    inst = Instance(CATALOG["transcendental_omega"], p, ctx, spec, rc, points=_grid((-1, 1), (-1, 1), 5),
                    xis=_xi_grid(-1, 1, 7))
    inst.variants["omega"] = omega
    return inst


# ------------------------------------------------------------ api


def list_catalog() -> list[dict]:
    """Machine-readable listing: id, anchor, row, epsilon, defaults, domain, classification."""
    return [
        {"id": e.id, "anchor": e.anchor, "row": e.row, "epsilon": e.epsilon, "params": dict(e.defaults),
         "domain": e.domain, "classification": e.classification, "level": e.level}
        for e in CATALOG.values()
    ]


def build(id: str, params: dict | None = None, ctx: GeneratorSet | None = None) -> Instance:
    if id not in CATALOG:
        raise KeyError(f"unknown catalog entry {id!r}")
    entry = CATALOG[id]
    merged = {**entry.defaults, **(params or {})}
    unknown = set(merged) - set(entry.defaults) - {"epsilon"}
    if unknown:
        raise ValueError(f"{id}: unknown parameters {sorted(unknown)}")
    if "s" in merged and merged["s"] not in (1, -1):
        raise ValueError("sign parameter s must be +1 or -1")
    return entry.builder(merged, ctx or standard_context())


def _mag(v) -> float:
    m = v.norm() if isinstance(v, GrassmannNumber) else abs(v)
    return m if math.isfinite(m) else math.inf  # NaN must never lose a max()


def _classical_check(inst, cfg):
    phi = inst.phi
    eps = inst.spec.epsilon
    vals, skipped = [], 0
    for pt in inst.points:
        if inst.exclude is not None and inst.exclude(*pt):
            skipped += 1
            continue
        vals.append(abs(pde.classical_residual(phi, eps, pt, cfg)))
    return {"max_residual": max(vals, default=0.0), "mean_residual": float(np.mean(vals)) if vals else 0.0,
            "points_used": len(vals), "points_excluded": skipped}


def _reduced_values(inst, cfg):
    return [max(_mag(r) for r in reductions.reduced_residual(inst.spec, inst.rc, xi, cfg)) for xi in inst.xis]


def _reduced_check(inst, cfg):
    return max(_reduced_values(inst, cfg), default=0.0)


def verify(inst: Instance, cfg: DiffConfig = DiffConfig()) -> dict:
    """Run the entry's residual checks; ``passed`` reflects the primary check at ``cfg.tol``."""
    e = inst.entry
    if inst.diff:
        cfg = replace(cfg, **inst.diff)
    rep = {"id": e.id, "anchor": e.anchor, "row": e.row, "params": dict(inst.params), "classification": e.classification,
           "tolerance": cfg.tol}
    if e.level == "density":
        vals = []
        for x, y in inst.points:
            rho, u, v = density_and_velocity(inst.phi, (x, y), cfg)
            pu, pv = kink_velocity(x, y, inst.params["C1"])
            vals.append(max(abs(rho - kink_density(x, y, inst.params["C1"])), abs(u - pu), abs(v - pv)))
        worst = max(vals)
        rep.update(max_residual=worst, mean_residual=float(np.mean(vals)), passed=worst <= cfg.tol)
        return rep
    if e.level == "omega":
        omega = inst.variants["omega"]
        params = {"epsilon": -1, "eta1": inst.ctx.gen("eta1"), "eta2": inst.ctx.gen("eta2")}
        om = max(_mag(reductions.omega_residual("script-L2", omega, xi, params, cfg)) for xi in inst.xis)
        lv = reductions.lift_verify(inst.spec, inst.rc, inst.points, cfg, inst.ctx)
        rep.update(omega_residual=om, lift=_strip(lv), max_residual=max(om, lv["max_residual"]),
                   mean_residual=lv["mean_residual"], points_excluded=lv["points_excluded"],
                   passed=om <= 1e-14 and lv["passed"])
        return rep
    if e.level == "reduced":
        vals = _reduced_values(inst, cfg)
        worst = max(vals)
        rep.update(max_residual=worst, mean_residual=float(np.mean(vals)), reduced_residual=worst,
                   passed=worst <= min(cfg.tol, 1e-8))
        return rep
    if e.level == "classical":
        c = _classical_check(inst, cfg)
        red = _reduced_check(inst, cfg)
        rep.update(c, reduced_residual=red, passed=c["max_residual"] <= cfg.tol and red <= cfg.tol)
        return rep
    lv = reductions.lift_verify(inst.spec, inst.rc, inst.points, cfg, inst.ctx, exclude=inst.exclude)
    rep.update(lift=_strip(lv), max_residual=lv["max_residual"], mean_residual=lv["mean_residual"],
               points_excluded=lv["points_excluded"], passed=lv["passed"])
    if inst.check is not None:
        extra = inst.check(cfg)
        rep["variants"] = extra
        if e.id == "susy_hyperbolic":
            rep["passed"] = rep["passed"] and extra["printed_lambda_equation"] <= cfg.tol
        if e.id == "susy_elliptic":
            rep["passed"] = rep["passed"] and extra[inst.params["variant"]] <= cfg.tol
    return rep


def _strip(lv: dict) -> dict:
    return {k: v for k, v in lv.items() if k != "samples"}


@lru_cache(maxsize=None)
def _served(id, frozen_params):
    inst = build(id, dict(frozen_params))
    rep = verify(inst)
    if not rep["passed"]:
        raise RegistrationError(f"{id} failed its residual gate: {rep.get('max_residual')}")
    return inst


def serve(id: str, params: dict | None = None) -> Instance:
    """Build an entry and hand it out only after its residual check passes."""
    return _served(id, tuple(sorted((params or {}).items())))


def density_and_velocity(phi: FieldCandidate, point, cfg: DiffConfig = DiffConfig()):
    """(exp(-u^2 - v^2), u, v) with u = phi_x and v = phi_y, real parts."""
    cache = JetCache(point, cfg)
    u, v = cache(phi, (1, 0)), cache(phi, (0, 1))
    u = complex(u.body if isinstance(u, GrassmannNumber) else u).real
    v = complex(v.body if isinstance(v, GrassmannNumber) else v).real
    return math.exp(-u * u - v * v), u, v


def kink_asymptotics_check(C1: float = 0.0, angle: float = 1e-8, tol: float = 1e-6) -> dict:
    """Density on rays just above and below the positive x-axis versus the two printed limits."""
    phi = kink_field(C1, 1)
    above = density_and_velocity(phi, (math.cos(angle), math.sin(angle)))[0]
    below = density_and_velocity(phi, (math.cos(angle), -math.sin(angle)))[0]
    lim_above = math.exp(-(1 + (math.pi / 2 + C1) ** 2))
    lim_below = math.exp(-(1 + (-math.pi / 2 + C1) ** 2))
    radial = max(
        abs(density_and_velocity(phi, (r * math.cos(t), r * math.sin(t)))[0] - density_and_velocity(phi, (math.cos(t), math.sin(t)))[0])
        for t in (0.3, 1.0, 2.0) for r in (0.5, 3.0)
    )
    return {
        "C1": C1,
        "above": above,
        "below": below,
        "limit_above": lim_above,
        "limit_below": lim_below,
        "radial_spread": radial,
        "passed": abs(above - lim_above) <= tol and abs(below - lim_below) <= tol and radial <= 1e-10,
    }


def kink_density_profile(C1: float = 0.0, n: int = 181):
    """Rows (theta, rho) along the unit circle in the upper half plane, plus the two limits."""
    rows = []
    for t in np.linspace(1e-6, math.pi - 1e-6, n):
        rows.append((float(t), kink_density(math.cos(t), math.sin(t), C1)))
    return rows, math.exp(-(1 + (math.pi / 2 + C1) ** 2)), math.exp(-(1 + (-math.pi / 2 + C1) ** 2))


EVEN_VALUES = (-0.2, -0.1, 0.05, 0.1, 0.15)
ODD_SCALES = (-1.0, -0.5, 0.3, 0.7, 1.2)


def central_points(inst: Instance, n: int = 4):
    """The ``n`` sample points nearest the middle of the entry's grid, so moved points stay in the domain."""
    pts = [p for p in inst.points if inst.exclude is None or not inst.exclude(*p)]
    P = np.array(pts)
    order = np.argsort(((P - P.mean(0)) ** 2).sum(1), kind="stable")
    return [tuple(map(float, P[i])) for i in order[:n]]


def symmetry_check(id: str, params: dict | None = None, cfg: DiffConfig = DiffConfig(), odd_generator: str = "K2") -> dict:
    """Transform an entry by every standard finite action at five parameter values.

    Odd actions take multiples of ``odd_generator``. On epsilon = -1
    classical entries the rotation M is expected to break the solution.
    """
    inst = build(id, params)
    if inst.entry.level in ("reduced", "density"):
        raise ValueError(f"{id} has no full-plane field to transform")
    if inst.diff:
        cfg = replace(cfg, **inst.diff)
    eps = inst.spec.epsilon
    pts = central_points(inst)
    if inst.spec.row.kind == "classical":
        acts = symmetry.standard_actions("classical")
        expect = ("M",) if eps == -1 else ()

        def residual(phi, psi, pt):
            return abs(pde.classical_residual(phi, eps, pt, cfg))
    else:
        acts = symmetry.standard_actions("susy")
        expect = ()

        def residual(phi, psi, pt):
            return max(_mag(r) for r in pde.special_residuals(phi, psi, eps, pt, cfg, inst.ctx))

    K = inst.ctx.gen(odd_generator)
    values = {k: ([c * K for c in ODD_SCALES] if a.odd else list(EVEN_VALUES)) for k, a in acts.items()}
    out = symmetry.invariance_sweep(inst.fields, acts, pts, residual, values, cfg.tol, expect)
    out.update(id=id, anchor=inst.entry.anchor, tolerance=cfg.tol)
    return out


def symmetry_applicable() -> list[str]:
    return [e.id for e in CATALOG.values() if e.level not in ("reduced", "density")]
