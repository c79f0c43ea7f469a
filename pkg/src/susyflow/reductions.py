"""Symmetry reductions: invariants, lifts, reduced ODE residuals and lift-back checks.

Rows are addressed by string ids. Classical rows are prefixed
``classical-eps1:`` or ``classical-eps-1:``; supersymmetric rows use the
subalgebra labels ``L1`` ... ``L12,k`` (splitting) and ``script-L2`` ...
``script-L8,m,n`` (non-splitting, with odd constants eta1 and eta2).

Reduced functions are 1-D candidates built with :func:`calculus.curve`;
their partials are taken along the first coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .calculus import DiffConfig, FieldCandidate, JetCache, StencilError, curve
from .grassmann import GeneratorSet, GrassmannNumber, Parity
from . import pde


class ChartError(ValueError):
    """The point lies outside the chart of the symmetry variable."""


class NotReducibleError(ValueError):
    """The subalgebra acts on dependent variables only and gives no reduction."""


@dataclass(frozen=True)
class ReducedCandidate:
    """F (even) and Lambda (odd) as functions of the symmetry variable."""

    F: FieldCandidate
    Lam: FieldCandidate | None = None
    label: str = ""

    def values(self, xi: float, cfg: DiffConfig = DiffConfig()) -> dict:
        """Derivatives F0..F2 and L0..L2 at ``xi``, computed on first access."""
        return _Jet(self, JetCache((xi, 0.0), cfg))


class _Jet(dict):
    def __init__(self, rc: ReducedCandidate, cache: JetCache):
        super().__init__()
        self.rc, self.cache = rc, cache

    def __missing__(self, key):
        f = self.rc.F if key[0] == "F" else self.rc.Lam
        v = self.cache(f, (int(key[1]), 0)) if f is not None else 0.0
        self[key] = v
        return v


def reduced(F: Callable, Lam: Callable | None = None, dF=None, dLam=None, label: str = "") -> ReducedCandidate:
    """Wrap plain callables of xi as a reduced candidate."""
    return ReducedCandidate(curve(F, dF, f"F[{label}]"), curve(Lam, dLam, f"Lam[{label}]") if Lam else None, label)


@dataclass(frozen=True)
class SubalgebraSpec:
    id: str
    epsilon: int = 1
    params: Mapping[str, float] = field(default_factory=dict)
    eta1: GrassmannNumber | None = None
    eta2: GrassmannNumber | None = None

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        row = ROWS.get(self.id)
        if row is None:
            raise KeyError(f"unknown subalgebra id {self.id!r}")
        for name in row.param_names:
            if name not in self.params:
                raise ValueError(f"{self.id} needs parameter {name}")
            if name in row.nonzero and self.params[name] == 0:
                raise ValueError(f"{self.id} needs {name} != 0")
        if row.fixed_epsilon is not None and self.epsilon != row.fixed_epsilon:
            raise ValueError(f"{self.id} belongs to epsilon = {row.fixed_epsilon}")

    @property
    def row(self) -> "Row":
        return ROWS[self.id]

    def p(self, name: str) -> float:
        return self.params[name]

    @property
    def etas(self):
        return self.eta1 if self.eta1 is not None else 0.0, self.eta2 if self.eta2 is not None else 0.0


@dataclass(frozen=True)
class Row:
    id: str
    kind: str  # classical | susy
    generator: str
    reducible: bool = True
    param_names: tuple[str, ...] = ()
    nonzero: tuple[str, ...] = ()
    fixed_epsilon: int | None = None
    variable: Callable | None = None
    chart: Callable | None = None
    lift: Callable | None = None
    reduced: Callable | None = None
    factors: Callable | None = None
    note: str = ""


ROWS: dict[str, Row] = {}


def _row(**kw) -> Row:
    r = Row(**kw)
    ROWS[r.id] = r
    return r


# ----------------------------------------------------------- helpers


def _fc(fn, label, parity=None) -> FieldCandidate:
    return FieldCandidate(fn, label=label, parity=parity)


def _lam(rc: ReducedCandidate):
    return rc.Lam.eval if rc.Lam is not None else (lambda xi, _y=0.0: 0.0)


def _always(x, y, s, margin):
    return True


def _K8(w, m, n, eps):
    """Common factor of the L8 reductions."""
    return (
        -eps * (1 + eps * m**2 / n**2) ** 2 * w * w
        + (2 * m / n**2 + 2 * eps * m**3 / n**4) * w
        + (1 + m**2 / n**2 - eps * m**2 / n**4)
    )


def delta(a, b) -> int:
    return 1 if a == b else 0


# ----------------------------------------------------------- classical rows, epsilon = 1

_row(id="classical-eps1:L1", kind="classical", generator="T3", reducible=False, fixed_epsilon=1,
     note="no invariant function: phi -> phi + K moves every graph")

_row(
    id="classical-eps1:L2", kind="classical", generator="T1", fixed_epsilon=1,
    variable=lambda x, y, s: y,
    chart=_always,
    lift=lambda rc, s: (_fc(lambda x, y: rc.F.eval(y, 0.0), "phi(y)"), None),
    reduced=lambda v, xi, s: ((1 - v["F1"] ** 2) * v["F2"],),
    factors=lambda x, y, s: (1.0,),
)

_row(
    id="classical-eps1:L3", kind="classical", generator="T3+mT1", param_names=("m",), nonzero=("m",), fixed_epsilon=1,
    variable=lambda x, y, s: y,
    chart=_always,
    lift=lambda rc, s: (_fc(lambda x, y: rc.F.eval(y, 0.0) + x / s.p("m"), "F(y)+x/m"), None),
    reduced=lambda v, xi, s: ((1 - v["F1"] ** 2) * v["F2"],),
    factors=lambda x, y, s: (1.0,),
)

_row(
    id="classical-eps1:L4", kind="classical", generator="S", fixed_epsilon=1,
    variable=lambda x, y, s: _ratio(x, y),
    chart=lambda x, y, s, margin: abs(y) > margin,
    lift=lambda rc, s: (_fc(lambda x, y: y * rc.F.eval(_ratio(x, y), 0.0), "yF(x/y)"), None),
    reduced=lambda v, xi, s: (
        ((1 + xi**2) - (1 + xi**2) ** 2 * v["F1"] ** 2 + 2 * xi * (1 + xi**2) * v["F0"] * v["F1"] - xi**2 * v["F0"] ** 2) * v["F2"],
    ),
    factors=lambda x, y, s: (1.0 / y,),
)

_row(
    id="classical-eps1:L5", kind="classical", generator="M", fixed_epsilon=1,
    variable=lambda x, y, s: x * x + y * y,
    chart=lambda x, y, s, margin: x * x + y * y > margin,
    lift=lambda rc, s: (_fc(lambda x, y: rc.F.eval(x * x + y * y, 0.0), "phi(x^2+y^2)"), None),
    reduced=lambda v, xi, s: (
        v["F1"] + xi * v["F2"] - 2 * xi * v["F1"] ** 3 - 4 * xi**2 * v["F1"] ** 2 * v["F2"],
    ),
    factors=lambda x, y, s: (4.0,),
)


def _l6_xi(x, y, s):
    if x <= 0:
        raise ChartError("the L6 invariant uses arctan(y/x) on x > 0")
    return math.atan(y / x) - s.p("a") * math.log(math.hypot(x, y))


_row(
    id="classical-eps1:L6", kind="classical", generator="S+aM", param_names=("a",), nonzero=("a",), fixed_epsilon=1,
    variable=_l6_xi,
    chart=lambda x, y, s, margin: x > margin,
    lift=lambda rc, s: (_fc(lambda x, y: math.hypot(x, y) * rc.F.eval(_l6_xi(x, y, s), 0.0), "rF(xi)"), None),
    reduced=lambda v, xi, s: (_l6_reduced(v, s.p("a")),),
    factors=lambda x, y, s: (-1.0 / math.hypot(x, y),),
)


def _l6_reduced(v, a):
    F, F1, F2 = v["F0"], v["F1"], v["F2"]
    return (
        -2 * a * (1 + a * a) * F * F1 * F2
        + (1 + a * a) ** 2 * F1**2 * F2
        + a * a * F**2 * F2
        - (1 + a * a) * F2
        - a * (1 + a * a) * F1**3
        + (1 + 2 * a * a) * F * F1**2
        - a * F**2 * F1
        + 2 * a * F1
        - F
    )


def _l7_angle(x, y):
    r = math.hypot(x, y)
    if r == 0:
        raise ChartError("origin excluded")
    return math.asin(y / r)


_row(
    id="classical-eps1:L7", kind="classical", generator="M+muT3", param_names=("mu",), nonzero=("mu",), fixed_epsilon=1,
    variable=lambda x, y, s: x * x + y * y,
    chart=lambda x, y, s, margin: x > margin,
    lift=lambda rc, s: (_fc(lambda x, y: rc.F.eval(x * x + y * y, 0.0) + s.p("mu") * _l7_angle(x, y), "F(r^2)+mu*asin(y/r)"), None),
    reduced=lambda v, xi, s: (
        v["F1"] + 2 * xi * v["F1"] - 4 * xi**2 * v["F1"] ** 3 + 2 * xi**2 * v["F2"] - 8 * xi**3 * v["F1"] ** 2 * v["F2"],
    ),
    factors=lambda x, y, s: (2.0 / (x * x + y * y),),
    note="the printed reduced equation is exact only for mu^2 = 1",
)

# ----------------------------------------------------------- classical rows, epsilon = -1

_row(
    id="classical-eps-1:S", kind="classical", generator="S(-1)", fixed_epsilon=-1,
    variable=lambda x, y, s: _ratio(x, y),
    chart=lambda x, y, s, margin: abs(y) > margin,
    lift=lambda rc, s: (_fc(lambda x, y: y * rc.F.eval(_ratio(x, y), 0.0), "yF(x/y)"), None),
    reduced=lambda v, xi, s: (
        ((1 + xi**2) + (1 - xi**2) ** 2 * v["F1"] ** 2 + 2 * xi * (1 - xi**2) * v["F0"] * v["F1"] + xi**2 * v["F0"] ** 2) * v["F2"],
    ),
    factors=lambda x, y, s: (1.0 / y,),
)


def _t_family_variable(x, y, s):
    a, b = s.p("a"), s.p("b")
    return a * y - b * x if a != 0 else x


def _t_family_lift(rc, s):
    a, b, c = s.p("a"), s.p("b"), s.p("c")
    if a != 0:
        return _fc(lambda x, y: c / a * x + rc.F.eval(a * y - b * x, 0.0), "c/a x + G(ay-bx)"), None
    return _fc(lambda x, y: c / b * y + rc.F.eval(x, 0.0), "c/b y + G(x)"), None


def _t_family_reduced(v, xi, s):
    a, b, c = s.p("a"), s.p("b"), s.p("c")
    w = v["F1"]
    if a != 0:
        px, py = c / a - b * w, a * w
        k = (1 + px * px) * b * b + 2 * px * py * a * b + (1 + py * py) * a * a
    else:
        k = 1 + w * w
    return (k * v["F2"],)


_row(
    id="classical-eps-1:T", kind="classical", generator="a t1 + b t2 + c t3", param_names=("a", "b", "c"), fixed_epsilon=-1,
    variable=_t_family_variable,
    chart=_always,
    lift=_t_family_lift,
    reduced=_t_family_reduced,
    factors=lambda x, y, s: (1.0,),
    note="reduced equation derived here; the text states only that solutions are linear",
)


def _ratio(x, y):
    if y == 0:
        raise ChartError("x/y needs y != 0")
    return x / y


# ----------------------------------------------------------- supersymmetric splitting rows


def _l1_reduced(v, xi, s):
    e = s.epsilon
    F, F1, F2, L, L1, L2 = (v[k] for k in ("F0", "F1", "F2", "L0", "L1", "L2"))
    G = F - xi * F1
    q = 1 + e * xi * xi
    bos = (
        (1 + xi * xi) * F2
        - e * q**2 * F1**2 * F2
        + 2 * xi * q * F * F1 * F2
        - e * xi * xi * F**2 * F2
        + 0.75 * e * G * (L * L1)
        - 1.5 * e * xi * G * (L * L2)
        + q * G * (L1 * L2)
    )
    fer = (
        (1 + xi * xi) * L2
        - e * q**2 * F1**2 * L2
        + 2 * xi * q * F * F1 * L2
        - e * xi * xi * F**2 * L2
        + xi * q * F1**2 * L1
        - e * (2 * xi * xi + e) * F * F1 * L1
        + e * xi * F**2 * L1
        - xi * L1
        - 0.75 * e * xi * xi * F1**2 * L
        + 1.5 * e * xi * F * F1 * L
        - 0.75 * e * F**2 * L
        + 0.75 * L
    )
    return bos, fer


def _l1_lift(rc, s):
    lam = _lam(rc)
    phi = _fc(lambda x, y: y * rc.F.eval(_ratio(x, y), 0.0), "yF(x/y)")
    psi = _fc(lambda x, y: y**1.5 * lam(_ratio(x, y), 0.0), "y^(3/2)Lam(x/y)", Parity.ODD)
    return phi, psi


_row(
    id="L1", kind="susy", generator="S",
    variable=lambda x, y, s: _ratio(x, y),
    chart=lambda x, y, s, margin: y > margin,
    lift=_l1_lift,
    reduced=_l1_reduced,
    factors=lambda x, y, s: (1.0 / y, y**-0.5),
)


def _fn_of(var):
    def lift(rc, s):
        lam = _lam(rc)
        if var == "y":
            return _fc(lambda x, y: rc.F.eval(y, 0.0), "phi(y)"), _fc(lambda x, y: lam(y, 0.0), "psi(y)", Parity.ODD)
        return _fc(lambda x, y: rc.F.eval(x, 0.0), "phi(x)"), _fc(lambda x, y: lam(x, 0.0), "psi(x)", Parity.ODD)

    return lift


def _pair_reduced(coef_fn):
    def red(v, xi, s):
        k = coef_fn(v["F1"], s)
        return (k * v["F2"], k * v["L2"])

    return red


_row(
    id="L2", kind="susy", generator="P1",
    variable=lambda x, y, s: y, chart=_always, lift=_fn_of("y"),
    reduced=_pair_reduced(lambda w, s: 1 - s.epsilon * w * w),
    factors=lambda x, y, s: (1.0, 1.0),
)

_row(
    id="L3", kind="susy", generator="P2",
    variable=lambda x, y, s: x, chart=_always, lift=_fn_of("x"),
    reduced=_pair_reduced(lambda w, s: 1 - s.epsilon * w * w),
    factors=lambda x, y, s: (1.0, 1.0),
)


def _l4_lift(rc, s):
    m = s.p("m")
    lam = _lam(rc)
    return (
        _fc(lambda x, y: rc.F.eval(y - m * x, 0.0), "phi(y-mx)"),
        _fc(lambda x, y: lam(y - m * x, 0.0), "psi(y-mx)", Parity.ODD),
    )


_row(
    id="L4,m", kind="susy", generator="P1+mP2", param_names=("m",), nonzero=("m",),
    variable=lambda x, y, s: y - s.p("m") * x, chart=_always, lift=_l4_lift,
    reduced=_pair_reduced(lambda w, s: (s.p("m") ** 2 + 1) - s.epsilon * (s.p("m") ** 2 + s.epsilon) ** 2 * w * w),
    factors=lambda x, y, s: (1.0, 1.0),
)

for _lbl, _gen in (("L5", "Z"), ("L9", "Y"), ("L10", "Q1"), ("L11", "Q2")):
    _row(id=_lbl, kind="susy", generator=_gen, reducible=False,
         note="the generator has no component along x or y, so no invariant solution exists")
_row(id="L12,k", kind="susy", generator="Q1+kQ2", reducible=False, param_names=("k",), nonzero=("k",),
     note="the generator has no component along x or y, so no invariant solution exists")


def _l6_lift(rc, s):
    m = s.p("m")
    lam = _lam(rc)
    return (
        _fc(lambda x, y: (rc.F.eval(y, 0.0) + x) / m, "(F(y)+x)/m"),
        _fc(lambda x, y: lam(y, 0.0), "psi(y)", Parity.ODD),
    )


def _l7_lift(rc, s):
    m = s.p("m")
    lam = _lam(rc)
    return (
        _fc(lambda x, y: (rc.F.eval(x, 0.0) + y) / m, "(F(x)+y)/m"),
        _fc(lambda x, y: lam(x, 0.0), "psi(x)", Parity.ODD),
    )


_row(
    id="L6,m", kind="susy", generator="Z+mP1", param_names=("m",), nonzero=("m",),
    variable=lambda x, y, s: y, chart=_always, lift=_l6_lift,
    reduced=_pair_reduced(lambda w, s: s.p("m") ** 2 - s.epsilon * w * w),
    factors=lambda x, y, s: (s.p("m") ** -3, s.p("m") ** -2),
)

_row(
    id="L7,m", kind="susy", generator="Z+mP2", param_names=("m",), nonzero=("m",),
    variable=lambda x, y, s: x, chart=_always, lift=_l7_lift,
    reduced=_pair_reduced(lambda w, s: s.p("m") ** 2 - s.epsilon * w * w),
    factors=lambda x, y, s: (s.p("m") ** -3, s.p("m") ** -2),
)


def _l8_lift(rc, s):
    m, n = s.p("m"), s.p("n")
    lam = _lam(rc)
    return (
        _fc(lambda x, y: rc.F.eval(x - m / n * y, 0.0) + y / n, "F(x-my/n)+y/n"),
        _fc(lambda x, y: lam(x - m / n * y, 0.0), "psi(x-my/n)", Parity.ODD),
    )


_row(
    id="L8,m,n", kind="susy", generator="Z+mP1+nP2", param_names=("m", "n"), nonzero=("m", "n"),
    variable=lambda x, y, s: x - s.p("m") / s.p("n") * y, chart=_always, lift=_l8_lift,
    reduced=_pair_reduced(lambda w, s: _K8(w, s.p("m"), s.p("n"), s.epsilon)),
    factors=lambda x, y, s: (1.0, 1.0),
)

# ----------------------------------------------------------- supersymmetric non-splitting rows


def _tail_lift(var, phi_fn, tail):
    """Lift with a fermionic polynomial tail ``tail(x, y)`` added to Lambda."""

    def lift(rc, s):
        lam = _lam(rc)
        v = var(s)
        e1, e2 = s.etas
        phi = _fc(lambda x, y: phi_fn(rc, s, x, y, v(x, y)), "phi")
        psi = _fc(lambda x, y: lam(v(x, y), 0.0) + tail(s, e1, e2, x, y), "Lam+tail", Parity.ODD)
        return phi, psi

    return lift


def _s2_reduced(v, xi, s):
    e = s.epsilon
    e1, e2 = s.etas
    w, w2, L2 = v["F1"], v["F2"], v["L2"]
    bos = -2 * e * (w * e2 * L2) - 2 * (w * e1 * e2) + w2 - e * w * w * w2
    fer = L2 - e * w * w * L2 + e1
    return bos, fer


_row(
    id="script-L2", kind="susy", generator="P1+eta1Q1+eta2Q2",
    variable=lambda x, y, s: y, chart=_always,
    lift=_tail_lift(lambda s: (lambda x, y: y), lambda rc, s, x, y, xi: rc.F.eval(xi, 0.0),
                    lambda s, e1, e2, x, y: 0.5 * e1 * x * x + e2 * x * y),
    reduced=_s2_reduced,
    factors=lambda x, y, s: (1.0, 1.0),
)


def _s3_reduced(v, xi, s):
    e = s.epsilon
    e1, e2 = s.etas
    w, w2, L2 = v["F1"], v["F2"], v["L2"]
    return (1 - e * w * w) * w2, L2 - e * w * w * L2 + e2


_row(
    id="script-L3", kind="susy", generator="P2+eta1Q1+eta2Q2",
    variable=lambda x, y, s: x, chart=_always,
    lift=_tail_lift(lambda s: (lambda x, y: x), lambda rc, s, x, y, xi: rc.F.eval(xi, 0.0),
                    lambda s, e1, e2, x, y: e1 * x * y + 0.5 * e2 * y * y),
    reduced=_s3_reduced,
    factors=lambda x, y, s: (1.0, 1.0),
)


def _s4_reduced(v, xi, s):
    e, m = s.epsilon, s.p("m")
    e1, e2 = s.etas
    w, w2, L2 = v["F1"], v["F2"], v["L2"]
    q = (1 + e * m * m) ** 2
    bos = (1 + m * m) * w2 - e * q * w * w * w2 + 2 * w * ((-e * e2 + m * e1) * L2 + e2 * e1)
    fer = (1 + m * m) * L2 - e * q * w * w * L2 + m * (2 * e2 - e * m * e1 + e * m * m * e2) * (w * w) + (e1 - m * e2)
    return bos, fer


_row(
    id="script-L4,m", kind="susy", generator="P1+mP2+eta1Q1+eta2Q2", param_names=("m",), nonzero=("m",),
    variable=lambda x, y, s: y - s.p("m") * x, chart=_always,
    lift=_tail_lift(lambda s: (lambda x, y: y - s.p("m") * x), lambda rc, s, x, y, xi: rc.F.eval(xi, 0.0),
                    lambda s, e1, e2, x, y: 0.5 * e1 * x * x - 0.5 * s.p("m") * e2 * x * x + e2 * x * y),
    reduced=_s4_reduced,
    factors=lambda x, y, s: (1.0, 1.0),
)

_row(id="script-L5", kind="susy", generator="Z+eta1Q1+eta2Q2", reducible=False,
     note="the generator has no component along x or y, so no invariant solution exists")


def _s6_reduced(v, xi, s):
    e, m = s.epsilon, s.p("m")
    e1, e2 = s.etas
    w, w2, L2 = v["F1"], v["F2"], v["L2"]
    bos = w2 - e * w * w * w2 - 2 / m**2 * (e1 * e2) * w - e * 2 / m * (e2 * w * L2)
    fer = L2 - e * w * w * L2 - 2 / m**2 * e2 * w - e / m**3 * (1 - e * m * m) * e1
    return bos, fer


_row(
    id="script-L6,m", kind="susy", generator="Z+mP1+eta1Q1+eta2Q2", param_names=("m",), nonzero=("m",),
    variable=lambda x, y, s: y, chart=_always,
    lift=_tail_lift(lambda s: (lambda x, y: y), lambda rc, s, x, y, xi: rc.F.eval(xi, 0.0) + x / s.p("m"),
                    lambda s, e1, e2, x, y: (0.5 * e1 * x * x + e2 * x * y) / s.p("m")),
    reduced=_s6_reduced,
    factors=lambda x, y, s: (1.0, 1.0),
)


def _s7_reduced(v, xi, s):
    e, m = s.epsilon, s.p("m")
    e1, e2 = s.etas
    w, w2, L2 = v["F1"], v["F2"], v["L2"]
    bos = w2 - e * w * w * w2 + 2 / m**2 * (e1 * L2) - e * 2 / m**3 * (e1 * e2)
    fer = L2 - e * w * w * L2 - 2 / m**2 * e1 * w - e / m**3 * (1 - e * m * m) * e2
    return bos, fer


_row(
    id="script-L7,m", kind="susy", generator="Z+mP2+eta1Q1+eta2Q2", param_names=("m",), nonzero=("m",),
    variable=lambda x, y, s: x, chart=_always,
    lift=_tail_lift(lambda s: (lambda x, y: x), lambda rc, s, x, y, xi: rc.F.eval(xi, 0.0) + y / s.p("m"),
                    lambda s, e1, e2, x, y: (e1 * x * y + 0.5 * e2 * y * y) / s.p("m")),
    reduced=_s7_reduced,
    factors=lambda x, y, s: (1.0, 1.0),
)


def _s8_reduced(v, xi, s):
    e, m, n = s.epsilon, s.p("m"), s.p("n")
    e1, e2 = s.etas
    w, w2, L2 = v["F1"], v["F2"], v["L2"]
    K = _K8(w, m, n, e)
    bos = K * w2 + 2 / n**2 * (e1 - e * m / n * e2) * (1 - m * w) * L2 - e * 2 / n**3 * (1 - m * w) * (e1 * e2)
    fer = (
        K * L2
        + (-e * 2 * m * m / n**4 * w - 2 / n**2 * w + 2 * m / n**2 * w * w + e * m**3 / n**4 * w * w - m / n**2 + e * m / n**4) * e1
        + (1 / n - e / n**3 + e * 2 * m / n**3 * w - e * m * m / n**3 * w * w) * e2
    )
    return bos, fer


_row(
    id="script-L8,m,n", kind="susy", generator="Z+mP1+nP2+eta1Q1+eta2Q2", param_names=("m", "n"), nonzero=("m", "n"),
    variable=lambda x, y, s: x - s.p("m") / s.p("n") * y, chart=_always,
    lift=_tail_lift(lambda s: (lambda x, y: x - s.p("m") / s.p("n") * y),
                    lambda rc, s, x, y, xi: rc.F.eval(xi, 0.0) + y / s.p("n"),
                    lambda s, e1, e2, x, y: e1 * x * y / s.p("n") - s.p("m") / (2 * s.p("n") ** 2) * e1 * y * y + e2 * y * y / (2 * s.p("n"))),
    reduced=_s8_reduced,
    factors=lambda x, y, s: (1.0, 1.0),
)


# ----------------------------------------------------------- operations


def catalog_ids(kind: str | None = None) -> list[str]:
    return [k for k, r in ROWS.items() if kind is None or r.kind == kind]


def _require(spec: SubalgebraSpec) -> Row:
    row = spec.row
    if not row.reducible:
        raise NotReducibleError(f"{spec.id}: {row.note}")
    return row


def symmetry_variable(spec: SubalgebraSpec, point) -> float:
    row = _require(spec)
    x, y = point
    if not row.chart(x, y, spec, 0.0):
        raise ChartError(f"{spec.id}: ({x}, {y}) outside the chart")
    return row.variable(x, y, spec)


def lift(spec: SubalgebraSpec, rc: ReducedCandidate):
    """Full-plane fields from the reduced functions; psi is None for classical rows."""
    return _require(spec).lift(rc, spec)


def reduced_residual(spec: SubalgebraSpec, rc: ReducedCandidate, xi: float, cfg: DiffConfig = DiffConfig()):
    """Printed reduced equations at ``xi``: one entry for classical rows, two for supersymmetric ones."""
    row = _require(spec)
    return row.reduced(rc.values(xi, cfg), xi, spec)


def full_residual(spec: SubalgebraSpec, phi, psi, point, cfg: DiffConfig = DiffConfig(), ctx=None):
    if spec.row.kind == "classical":
        return (pde.classical_residual(phi, spec.epsilon, point, cfg),)
    return pde.special_residuals(phi, psi, spec.epsilon, point, cfg, ctx)


def _mag(v) -> float:
    m = v.norm() if isinstance(v, GrassmannNumber) else abs(v)
    return m if math.isfinite(m) else math.inf  # NaN must never lose a max()


def reduction_identity(spec: SubalgebraSpec, rc: ReducedCandidate, points, cfg: DiffConfig = DiffConfig(), ctx=None) -> float:
    """Largest gap between full residuals of the lift and factor * reduced residual.

    Holds for any reduced functions, solutions or not, so it tests the
    transcription of each reduced equation directly.
    """
    row = _require(spec)
    phi, psi = row.lift(rc, spec)
    worst = 0.0
    for pt in points:
        full = full_residual(spec, phi, psi, pt, cfg, ctx)
        red = row.reduced(rc.values(row.variable(*pt, spec), cfg), row.variable(*pt, spec), spec)
        for f, r, k in zip(full, red, row.factors(*pt, spec)):
            worst = max(worst, _mag(f - k * r))
    return worst


def decoupling_condition(rc: ReducedCandidate, xi: float, epsilon: int, cfg: DiffConfig = DiffConfig()):
    """(3/4 eps L L' - 3/2 eps xi L L'' + (1 + eps xi^2) L' L'') (F - xi F')."""
    v = rc.values(xi, cfg)
    L, L1, L2 = v["L0"], v["L1"], v["L2"]
    first = 0.75 * epsilon * (L * L1) - 1.5 * epsilon * xi * (L * L2) + (1 + epsilon * xi * xi) * (L1 * L2)
    return first * (v["F0"] - xi * v["F1"])


def grid(xmin, xmax, nx, ymin, ymax, ny):
    return [(float(x), float(y)) for y in np.linspace(ymin, ymax, ny) for x in np.linspace(xmin, xmax, nx)]


def lift_verify(spec: SubalgebraSpec, rc: ReducedCandidate, points, cfg: DiffConfig = DiffConfig(), ctx=None,
                margin: float = 0.05, exclude: Callable | None = None) -> dict:
    """Lift the reduced functions and evaluate the full residuals over ``points``.

    Points outside the chart (with ``margin``) or failing ``exclude`` are
    skipped and counted; so are points whose stencil leaves the domain.
    """
    row = _require(spec)
    phi, psi = row.lift(rc, spec)
    worst_b = worst_f = 0.0
    used = skipped = 0
    samples = []
    for pt in points:
        if not row.chart(pt[0], pt[1], spec, margin) or (exclude is not None and exclude(*pt)):
            skipped += 1
            continue
        try:
            res = full_residual(spec, phi, psi, pt, cfg, ctx)
        except (StencilError, ChartError):
            skipped += 1
            continue
        used += 1
        worst_b = max(worst_b, _mag(res[0]))
        if len(res) > 1:
            worst_f = max(worst_f, _mag(res[1]))
        samples.append((pt, max(_mag(r) for r in res)))
    return {
        "id": spec.id,
        "epsilon": spec.epsilon,
        "max_bosonic": worst_b,
        "max_fermionic": worst_f,
        "max_residual": max(worst_b, worst_f),
        "mean_residual": float(np.mean([r for _, r in samples])) if samples else 0.0,
        "points_used": used,
        "points_excluded": skipped,
        "samples": samples,
        "tolerance": cfg.tol,
        "passed": used > 0 and max(worst_b, worst_f) <= cfg.tol,
    }


# ----------------------------------------------------------- combined first-order forms

OMEGA_FAMILIES = ("script-L2", "script-L4,m", "script-L6,m", "script-L7,m")


def omega_printed(family: str, w, w1, epsilon: int, eta1, eta2, m: float = 1.0):
    """Printed first-order equation for omega (the derivative of the bosonic unknown) and its derivative ``w1``."""
    e, dl = epsilon, delta(epsilon, 1)
    ee = eta1 * eta2
    if family == "script-L2":
        return (1 - e * w * w) ** 2 * w1 - 2 * (ee * w**3) + 4 * dl * (w * ee)
    if family == "script-L4,m":
        q = 1 + e * m * m
        return (
            e * (1 + m * m) ** 2 * w1
            - 2 * (1 + m * m) * q**2 * w * w * w1
            + e * q**4 * w**4 * w1
            + 2 * (1 - m * m) * (ee * w**3)
            - 4 * dl * (w * ee)
        )
    if family == "script-L6,m":
        return (1 - e * w * w) ** 2 * w1 + e * 2 / m**2 * (ee * w**3) + 2 / m**4 * (1 - 2 * m * m * dl) * (ee * w)
    if family == "script-L7,m":
        return (1 - e * w * w) ** 2 * w1 + 2 / m**5 * ee * (m * m * w * w + e - 2 * m * m * dl)
    raise KeyError(family)


# The printed combined forms correspond to the second reduced equation solved
# for Lambda'' and substituted into the first, times this normalisation.
def _omega_norm(family, A, epsilon):
    return epsilon * A if family == "script-L4,m" else A


def omega_derived(family: str, w, w1, epsilon: int, eta1, eta2, m: float = 1.0):
    """Combined first-order form obtained here by eliminating Lambda'' from the reduced pair."""
    spec = SubalgebraSpec(family, epsilon, {"m": m} if "m" in family else {}, eta1, eta2)
    row = spec.row
    base = {"F0": 0.0, "F1": w, "F2": w1, "L0": 0.0, "L1": 0.0}
    # the fermionic equation is affine in Lambda'': A L2 + B
    B = row.reduced({**base, "L2": 0.0}, 0.0, spec)[1]
    A_probe = row.reduced({**base, "L2": 1.0}, 0.0, spec)[1] - B
    A = A_probe.body if isinstance(A_probe, GrassmannNumber) else A_probe
    if isinstance(A_probe, GrassmannNumber) and not A_probe.soul.is_zero():
        A = A_probe
    L2 = -(B / A) if not isinstance(A, GrassmannNumber) else -(B * A.inverse())
    bos = row.reduced({**base, "L2": L2}, 0.0, spec)[0]
    return _omega_norm(family, A, epsilon) * bos


def omega_residual(family: str, omega: FieldCandidate, point: float, params: Mapping, cfg: DiffConfig = DiffConfig(), form: str = "printed"):
    """Printed (or derived) first-order omega equation for a 1-D candidate ``omega``."""
    cache = JetCache((point, 0.0), cfg)
    w, w1 = cache(omega, (0, 0)), cache(omega, (1, 0))
    fn = omega_printed if form == "printed" else omega_derived
    return fn(family, w, w1, params["epsilon"], params["eta1"], params["eta2"], params.get("m", 1.0))


def combined_residual_L8(F: FieldCandidate, xi: float, m: float, n: float, epsilon: int, eta1, eta2, cfg: DiffConfig = DiffConfig()):
    """Printed second-order equation for F obtained from the two script-L8 reductions."""
    cache = JetCache((xi, 0.0), cfg)
    w, w2 = cache(F, (1, 0)), cache(F, (2, 0))
    return l8_combined_printed(w, w2, m, n, epsilon, eta1, eta2)


def l8_combined_printed(w, w2, m, n, epsilon, eta1, eta2):
    e, dl = epsilon, delta(epsilon, 1)
    a = (
        (m * m + e * n * n) ** 4 * w**4
        - 4 * e * m * (n * n + e * m * m) ** 3 * w**3
        + (6 * m * m * (m * m + e * n * n) ** 2 - 2 * e * n * n * (n**4 + e * m**4) * (n * n + e * m * m) - 4 * m * m * n**4 * (n * n + m * m) * dl) * w * w
        + 4 * m * (n * n * (n**4 + e * m**4) - e * m * m * (n * n + e * m * m) + 2 * m * m * n**4 * dl) * w
        + (m * m * (1 - e * n * n) - e * n**4) ** 2
    )
    b = (
        -2 * e * m * n**3 * (m * m + e * n * n) * w**3
        + 2 * n**3 * (n * n + 3 * e * m * m) * w * w
        + (4 * m * n**5 * dl - 6 * e * m * n**3) * w
        + 2 * e * n**3
        - 4 * n**5 * dl
    )
    return a * w2 + b * (eta1 * eta2)


def l8_combined_derived(w, w2, m, n, epsilon, eta1, eta2):
    """n^8 K(w) times the bosonic reduction with Lambda'' eliminated."""
    spec = SubalgebraSpec("script-L8,m,n", epsilon, {"m": m, "n": n}, eta1, eta2)
    base = {"F0": 0.0, "F1": w, "F2": w2, "L0": 0.0, "L1": 0.0}
    K = _K8(w, m, n, epsilon)
    B = spec.row.reduced({**base, "L2": 0.0}, 0.0, spec)[1]
    bos = spec.row.reduced({**base, "L2": -(B / K)}, 0.0, spec)[0]
    return n**8 * K * bos


PROBE_PARAMS = {"m": 1.3, "n": 0.7, "a": 0.4, "mu": 1.0, "b": 0.5, "c": 0.2}
PROBE_POINTS = ((0.6, 0.8), (1.1, 0.7), (0.7, 1.3))


def probe_candidate(spec: SubalgebraSpec, ctx) -> ReducedCandidate:
    """Smooth non-solution reduced functions used to test the reduction identity.

    Script rows get a Grassmann-valued F with an eta1 eta2 part, since their
    lifts carry eta tails.
    """
    if spec.row.kind == "classical":
        return reduced(lambda t: 0.3 * math.sin(t) + 0.1 * t * t + 0.2, label="probe")
    e1, e2, f1, f2, K1 = ctx.gens("eta1", "eta2", "f1", "f2", "K1")
    lam = lambda t: math.cos(0.7 * t) * f1 + (0.3 * t * t) * f2 + 0.1 * t * (K1 * e1 * e2)
    if spec.id.startswith("script"):
        F = lambda t: ctx.scalar(0.3 * math.sin(t) + 0.1 * t * t + 0.2) + (0.2 * t) * (e1 * e2)
    else:
        F = lambda t: 0.3 * math.sin(t) + 0.1 * t * t + 0.2
    return reduced(F, lam, label="probe")


def probe_spec(id: str, epsilon: int, ctx, **params) -> SubalgebraSpec:
    row = ROWS[id]
    vals = {k: params.get(k, PROBE_PARAMS[k]) for k in row.param_names}
    return SubalgebraSpec(id, epsilon, vals, ctx.gen("eta1"), ctx.gen("eta2"))
