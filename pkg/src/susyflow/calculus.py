"""Central differences with Richardson extrapolation for scalar and Grassmann fields.

Values are combined linearly, so a Grassmann-valued field is differentiated
coefficient by coefficient. Mixed partials use the tensor product of 1-D
central stencils (nested differences with a shared step). A derivative of
total order n uses the base step scaled by ``growth**(n-1)`` so that roundoff
stays well below truncation error at every order; third-order partials take
one extra extrapolation level to pay for their larger step.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .grassmann import GrassmannNumber, Parity, g_parity

MAX_ORDER = 3
PROBE_SEED = 20240611

# 1-D central stencils: derivative order -> (offsets, weights), error O(h^2)
_STENCILS = {
    0: ((0,), (1.0,)),
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
}


class StencilError(ValueError):
    """The field could not be evaluated somewhere on the stencil."""


class RegistrationError(ValueError):
    """Registered analytic derivatives disagree with finite differences."""


@dataclass(frozen=True)
class DiffConfig:
    h: float = 1e-3
    levels: int = 2
    tol: float = 1e-6
    growth: float = 14.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if self.levels < 1:
            raise ValueError("richardson levels must be >= 1")

    def step(self, order: int) -> float:
        return self.h * self.growth ** max(order - 1, 0)


Value = "complex | GrassmannNumber"


@dataclass(frozen=True, eq=False)
class FieldCandidate:
    """A field on the (x, y) plane with optional closed-form partials.

    ``analytic_derivs`` maps a multi-index ``(i, j)`` to a callable of
    ``(x, y)``. ``base``, ``shift`` and ``coef`` mark a derived field whose
    values are ``coef`` times the ``shift`` partial of ``base``;
    differentiating it adds multi-indices instead of nesting difference
    quotients. A non-empty ``terms`` tuple of ``(coefficient, field)`` pairs
    makes the field a left-multiplied linear combination, differentiated
    term by term.
    """

    eval: Callable[[float, float], object]
    analytic_derivs: Mapping[tuple[int, int], Callable[[float, float], object]] = field(default_factory=dict)
    label: str = ""
    parity: Parity | None = None
    base: "FieldCandidate | None" = None
    shift: tuple[int, int] = (0, 0)
    coef: complex = 1.0
    terms: tuple = ()

    def __call__(self, x: float, y: float):
        return self.eval(x, y)


def _is_finite(v) -> bool:
    if isinstance(v, GrassmannNumber):
        return all(cmath.isfinite(c) for c in v.coeffs.values())
    return cmath.isfinite(v)


def _norm(v) -> float:
    return v.norm() if isinstance(v, GrassmannNumber) else abs(v)


def _combine(values: Iterable, weights: Iterable[float]):
    """Weighted sum that keeps plain numbers plain."""
    acc: dict[int, complex] = {}
    ctx = None
    scalar = 0j
    for v, w in zip(values, weights):
        if w == 0:
            continue
        if isinstance(v, GrassmannNumber):
            ctx = v.ctx
            for k, c in v.coeffs.items():
                acc[k] = acc.get(k, 0) + w * c
        else:
            scalar += w * v
    if ctx is None:
        return scalar
    if scalar != 0:
        acc[0] = acc.get(0, 0) + scalar
    return GrassmannNumber(ctx, acc)


def _sub(a, b):
    return _combine((a, b), (1.0, -1.0))


class _Evaluator:
    """Memoised field evaluation over one jet computation."""

    def __init__(self, f: FieldCandidate):
        self.f = f
        self.cache: dict[tuple[float, float], object] = {}

    def __call__(self, x: float, y: float):
        key = (x, y)
        if key in self.cache:
            return self.cache[key]
        try:
            v = self.f.eval(x, y)
        except (ArithmeticError, ValueError) as exc:
            raise StencilError(f"{self.f.label or 'field'} undefined at ({x:.6g}, {y:.6g}): {exc}") from exc
        if not _is_finite(v):
            raise StencilError(f"{self.f.label or 'field'} not finite at ({x:.6g}, {y:.6g})")
        self.cache[key] = v
        return v


def _difference(ev: _Evaluator, point, mi, h: float):
    i, j = mi
    ox, wx = _STENCILS[i]
    oy, wy = _STENCILS[j]
    x0, y0 = point
    vals, ws = [], []
    for a, wa in zip(ox, wx):
        for b, wb in zip(oy, wy):
            vals.append(ev(x0 + a * h, y0 + b * h))
            ws.append(wa * wb / h ** (i + j))
    return _combine(vals, ws)


def _richardson(ev: _Evaluator, point, mi, cfg: DiffConfig, levels: int):
    h = cfg.step(mi[0] + mi[1])
    if mi == (0, 0):
        return ev(*point), 0.0
    row = [_difference(ev, point, mi, h)]
    prev_best = row[0]
    err = math.inf
    for lvl in range(1, levels + 1):
        new = [_difference(ev, point, mi, h / 2**lvl)]
        for k in range(1, lvl + 1):
            fac = 4.0**k
            new.append(_combine((new[k - 1], row[k - 1]), (fac / (fac - 1), -1.0 / (fac - 1))))
        err = _norm(_sub(new[-1], prev_best))
        prev_best = new[-1]
        row = new
    return row[-1], err


def _resolve(f: FieldCandidate, mi: tuple[int, int]):
    coef = 1.0
    while f.base is not None:
        mi = (mi[0] + f.shift[0], mi[1] + f.shift[1])
        coef *= f.coef
        f = f.base
    return f, mi, coef


def _scale(v, c):
    return v if isinstance(c, (int, float, complex)) and c == 1 else c * v


def abs_coef(c) -> float:
    return _norm(c)


def _sum_left(coefs):
    coefs = list(coefs)

    def total(values):
        out = 0j
        for c, v in zip(coefs, values):
            out = out + _scale(v, c)
        return out

    return total


def partial_estimate(f: FieldCandidate, point, mi: tuple[int, int], cfg: DiffConfig = DiffConfig(), *, _ev=None, levels=None):
    """Partial derivative and an error estimate (0 for analytic derivatives)."""
    f, mi, coef = _resolve(f, tuple(mi))
    if f.terms:
        parts = [partial_estimate(g, point, mi, cfg, levels=levels) for _, g in f.terms]
        value = _sum_left(c for c, _ in f.terms)(p[0] for p in parts)
        err = sum(abs_coef(c) * p[1] for (c, _), p in zip(f.terms, parts))
        return _scale(value, coef), err * abs_coef(coef)
    if min(mi) < 0 or mi[0] + mi[1] > MAX_ORDER:
        raise ValueError(f"multi-index {mi} outside total order {MAX_ORDER}")
    if mi in f.analytic_derivs:
        try:
            return _scale(f.analytic_derivs[mi](*point), coef), 0.0
        except (ArithmeticError, ValueError) as exc:
            raise StencilError(f"{f.label or 'field'} derivative {mi} undefined at {point}: {exc}") from exc
    ev = _ev if _ev is not None and _ev.f is f else _Evaluator(f)
    if levels is None:
        levels = cfg.levels + (1 if mi[0] + mi[1] == 3 else 0)
    value, err = _richardson(ev, tuple(point), mi, cfg, levels)
    return _scale(value, coef), err * abs_coef(coef)


def partial(f: FieldCandidate, point, mi: tuple[int, int], cfg: DiffConfig = DiffConfig()):
    return partial_estimate(f, point, mi, cfg)[0]


class JetCache:
    """Partials of several fields at one point with shared evaluations.

    Calling the cache returns the value; ``errors`` keeps the Richardson
    error estimate of every partial computed so far.
    """

    def __init__(self, point, cfg: DiffConfig = DiffConfig()):
        self.point = tuple(point)
        self.cfg = cfg
        self._evals: dict[FieldCandidate, _Evaluator] = {}
        self._values: dict[tuple[FieldCandidate, tuple[int, int]], tuple[object, float]] = {}
        self.errors: list[float] = []

    def estimate(self, f: FieldCandidate, mi=(0, 0)):
        base, full, coef = _resolve(f, tuple(mi))
        if base.terms:
            parts = [self.estimate(g, full) for _, g in base.terms]
            value = _sum_left(c for c, _ in base.terms)(p[0] for p in parts)
            err = sum(abs_coef(c) * p[1] for (c, _), p in zip(base.terms, parts))
            return _scale(value, coef), err * abs_coef(coef)
        # keyed on the field itself: ids of short-lived derived fields get reused
        key = (base, full)
        if key not in self._values:
            ev = self._evals.get(base)
            if ev is None:
                ev = self._evals[base] = _Evaluator(base)
            value, err = partial_estimate(base, self.point, full, self.cfg, _ev=ev)
            self._values[key] = (value, err)
            self.errors.append(err)
        value, err = self._values[key]
        return _scale(value, coef), err * abs_coef(coef)

    def __call__(self, f: FieldCandidate, mi=(0, 0)):
        return self.estimate(f, mi)[0]

    @property
    def max_error(self) -> float:
        return max(self.errors, default=0.0)


def jet(f: FieldCandidate, point, multiindices: Iterable[tuple[int, int]], cfg: DiffConfig = DiffConfig()):
    """Several partials at one point, sharing field evaluations."""
    cache = JetCache(point, cfg)
    return {tuple(mi): cache(f, mi) for mi in multiindices}


def shifted(f: FieldCandidate, mi: tuple[int, int], coef: complex = 1.0, label: str | None = None) -> FieldCandidate:
    """``coef`` times the ``mi`` partial of ``f``, differentiated without nesting."""
    cfg = DiffConfig()

    def ev(x, y, _f=f, _mi=tuple(mi)):
        return _scale(partial(_f, (x, y), _mi, cfg), coef)

    return FieldCandidate(ev, label=label or f"d{tuple(mi)}[{f.label}]", parity=f.parity, base=f, shift=tuple(mi), coef=coef)


def scaled(f: FieldCandidate, coef: complex, label: str | None = None) -> FieldCandidate:
    return shifted(f, (0, 0), coef, label or f"{coef}*{f.label}")


def combination(pairs, label: str = "", parity: Parity | None = None) -> FieldCandidate:
    """The field sum of ``coef * field`` over ``pairs``; coefficients multiply from the left."""
    pairs = tuple((c, g) for c, g in pairs)

    def ev(x, y):
        out = 0j
        for c, g in pairs:
            out = out + _scale(g.eval(x, y), c)
        return out

    return FieldCandidate(ev, label=label or "+".join(g.label for _, g in pairs), parity=parity, terms=pairs)


def probe_points(n: int = 3, box=((0.5, 1.5), (0.5, 1.5)), seed: int = PROBE_SEED) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    (x0, x1), (y0, y1) = box
    return [(float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1))) for _ in range(n)]


def _check_parity(v, want: Parity, label: str) -> None:
    if isinstance(v, GrassmannNumber):
        got = g_parity(v)
        if v.is_zero():
            return
        if got is not want:
            from .grassmann import ParityError

            raise ParityError(f"{label}: expected {want.name.lower()} values, found {got.name.lower()}")
    elif want is Parity.ODD and v != 0:
        from .grassmann import ParityError

        raise ParityError(f"{label}: a plain number cannot be odd")


def register(
    eval: Callable,
    analytic_derivs: Mapping | None = None,
    label: str = "",
    parity: Parity | None = None,
    probe_box=((0.5, 1.5), (0.5, 1.5)),
    cfg: DiffConfig = DiffConfig(),
    n_probe: int = 3,
) -> FieldCandidate:
    """Build a candidate, validating analytic partials and parity at seeded probes."""
    f = FieldCandidate(eval, dict(analytic_derivs or {}), label, parity)
    bare = FieldCandidate(eval, {}, label, parity)
    for pt in probe_points(n_probe, probe_box):
        if parity is not None:
            _check_parity(eval(*pt), parity, label)
        for mi, fn in f.analytic_derivs.items():
            exact = fn(*pt)
            approx = partial(bare, pt, mi, cfg)
            gap = _norm(_sub(exact, approx))
            if gap > cfg.tol * max(1.0, _norm(exact)):
                raise RegistrationError(f"{label}: derivative {mi} off by {gap:.3g} at {pt}")
    return f


def constant(value, label: str = "const", parity: Parity | None = None) -> FieldCandidate:
    zero = value * 0

    def d(x, y):
        return zero

    derivs = {(i, j): d for i in range(4) for j in range(4) if 0 < i + j <= MAX_ORDER}
    return FieldCandidate(lambda x, y: value, derivs, label, parity)


def curve(fn: Callable[[float], object], derivs: Mapping[int, Callable] | None = None, label: str = "") -> FieldCandidate:
    """A function of one variable, seen as a field constant in y."""
    ad = {(k, 0): (lambda x, y, _g=g: _g(x)) for k, g in (derivs or {}).items()}
    return FieldCandidate(lambda x, y: fn(x), ad, label)


def dcurve(c: FieldCandidate, xi: float, k: int, cfg: DiffConfig = DiffConfig()):
    return partial(c, (xi, 0.0), (k, 0), cfg)
