"""Superfields Phi = A + theta*B, the operators D and H, and the general superfield equation.

The odd coordinate theta is one more generator of the working
:class:`GeneratorSet`; it must not appear inside the component fields.
Products are taken in the printed order because odd factors anticommute.
"""

from __future__ import annotations

from dataclasses import dataclass
import math
from math import factorial

from .calculus import DiffConfig, FieldCandidate, JetCache, combination, scaled, shifted
from .grassmann import ContextError, GeneratorSet, GrassmannNumber, Parity, ParityError, g_parity, random_element

THETA = "theta"
# theta first keeps theta-leading monomials in canonical order
STANDARD_GENERATORS = (THETA, "eta1", "eta2", "E1", "K1", "K2", "f1", "f2")


def standard_context(names=STANDARD_GENERATORS) -> GeneratorSet:
    return GeneratorSet(tuple(names))


@dataclass(frozen=True)
class SusyParams:
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    epsilon: int = 1

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError(f"epsilon must be +1 or -1, got {self.epsilon}")

    @property
    def is_special(self) -> bool:
        return self.a == self.b == self.c == self.d == 0


def as_grassmann(v, ctx: GeneratorSet) -> GrassmannNumber:
    if isinstance(v, GrassmannNumber):
        if v.ctx != ctx:
            raise ContextError("value lives over a different generator set")
        return v
    return ctx.scalar(v)


@dataclass(frozen=True, eq=False)
class SuperField:
    """Phi = A + theta*B with theta leftmost.

    ``kind`` is the parity of Phi itself: A carries ``kind`` and B the
    opposite parity. The field Psi + theta*phi of the model is odd.
    """

    A: FieldCandidate
    B: FieldCandidate
    ctx: GeneratorSet
    kind: Parity = Parity.ODD
    theta: str = THETA

    def __post_init__(self):
        if self.theta not in self.ctx.names:
            raise ContextError(f"generator set lacks reserved generator {self.theta!r}")

    def value(self, cache: JetCache, mi=(0, 0)) -> GrassmannNumber:
        a = as_grassmann(cache(self.A, mi), self.ctx)
        b = as_grassmann(cache(self.B, mi), self.ctx)
        return a + self.ctx.gen(self.theta) * b

    def validate(self, point, cfg: DiffConfig = DiffConfig()) -> None:
        """Check component parities and theta-freeness at ``point``."""
        cache = JetCache(point, cfg)
        tmask = self.ctx.mask([self.theta])
        other = Parity.EVEN if self.kind is Parity.ODD else Parity.ODD
        for comp, want, name in ((self.A, self.kind, "A"), (self.B, other, "B")):
            v = as_grassmann(cache(comp), self.ctx)
            if any(k & tmask for k in v.coeffs):
                raise ContextError(f"component {name} uses the reserved generator {self.theta}")
            if not v.is_zero() and g_parity(v) is not want:
                raise ParityError(f"component {name} should be {want.name.lower()}")


def superfield(psi: FieldCandidate, phi: FieldCandidate, ctx: GeneratorSet) -> SuperField:
    """The model superfield psi + theta*phi."""
    return SuperField(psi, phi, ctx, Parity.ODD)


def _flip(p: Parity) -> Parity:
    return Parity.EVEN if p is Parity.ODD else Parity.ODD


def apply_D(phi: SuperField) -> SuperField:
    """D(A + theta B) = B + theta A_x."""
    return SuperField(phi.B, shifted(phi.A, (1, 0)), phi.ctx, _flip(phi.kind), phi.theta)


def apply_H(phi: SuperField) -> SuperField:
    """H(A + theta B) = B - theta A_x."""
    return SuperField(phi.B, shifted(phi.A, (1, 0), -1.0), phi.ctx, _flip(phi.kind), phi.theta)


def apply_dx(phi: SuperField) -> SuperField:
    return SuperField(shifted(phi.A, (1, 0)), shifted(phi.B, (1, 0)), phi.ctx, phi.kind, phi.theta)


def apply_dy(phi: SuperField) -> SuperField:
    return SuperField(shifted(phi.A, (0, 1)), shifted(phi.B, (0, 1)), phi.ctx, phi.kind, phi.theta)


def negate(phi: SuperField) -> SuperField:
    return SuperField(scaled(phi.A, -1.0), scaled(phi.B, -1.0), phi.ctx, phi.kind, phi.theta)


def add(p: SuperField, q: SuperField) -> SuperField:
    if p.kind is not q.kind:
        raise ParityError("cannot add superfields of different parity")
    return SuperField(combination([(1.0, p.A), (1.0, q.A)]), combination([(1.0, p.B), (1.0, q.B)]), p.ctx, p.kind, p.theta)


def split_theta(g: GrassmannNumber, theta: str = THETA) -> tuple[GrassmannNumber, GrassmannNumber]:
    """Write g = g0 + theta*g1 with theta-free g0, g1."""
    ctx = g.ctx
    t = ctx.index(theta)
    tbit = 1 << t
    lower = tbit - 1
    free, coef = {}, {}
    for k, v in g.coeffs.items():
        if k & tbit:
            # move theta to the front past the generators below it
            sign = -1 if bin(k & lower).count("1") % 2 else 1
            coef[k ^ tbit] = sign * v
        else:
            free[k] = v
    return GrassmannNumber(ctx, free), GrassmannNumber(ctx, coef)


def superfield_residual(phi: SuperField, p: SusyParams, point, cfg: DiffConfig = DiffConfig()) -> GrassmannNumber:
    """Left-hand side of the general superfield equation at ``point``.

    Component partials up to order three are required, since
    D^5 Phi = phi_xx + theta psi_xxx.
    """
    cache = JetCache(point, cfg)
    D1 = apply_D(phi)
    D2 = apply_D(D1)
    D3 = apply_D(D2)
    D4 = apply_D(D3)
    D5 = apply_D(D4)
    eps, a, b, c, d = p.epsilon, p.a, p.b, p.c, p.d

    def v(S, mi=(0, 0)):
        return S.value(cache, mi)

    y, yy = (0, 1), (0, 2)
    r = v(D4)
    r = r - eps * a * (v(D2) * v(D3) * v(D5))
    r = r - eps * (1 - a) * (v(D3) * v(D3) * v(D4))
    r = r - 2 * b * (v(D2) * v(D1, y) * v(D3, y))
    r = r - 2 * c * (v(D3) * v(phi, y) * v(D3, y))
    r = r - 2 * (1 - b - c) * (v(D3) * v(D1, y) * v(D2, y))
    r = r + v(phi, yy)
    r = r - eps * d * (v(phi, y) * v(D1, y) * v(D1, yy))
    r = r - eps * (1 - d) * (v(D1, y) * v(D1, y) * v(phi, yy))
    return r


def special_superfield_residual(phi: SuperField, epsilon: int, point, cfg: DiffConfig = DiffConfig()) -> GrassmannNumber:
    """The superfield equation with a = b = c = d = 0, as an independent code path."""
    cache = JetCache(point, cfg)
    D1 = apply_D(phi)
    D2 = apply_D(D1)
    D3 = apply_D(D2)
    D4 = apply_D(D3)
    y, yy = (0, 1), (0, 2)
    d3 = D3.value(cache)
    d1y = D1.value(cache, y)
    pyy = phi.value(cache, yy)
    return (
        D4.value(cache)
        - epsilon * (d3 * d3 * D4.value(cache))
        - 2 * (d3 * d1y * D2.value(cache, y))
        + pyy
        - epsilon * (d1y * d1y * pyy)
    )


def _finite(v: float) -> float:
    return v if math.isfinite(v) else math.inf


def decompose_check(phi: SuperField, p: SusyParams, points, cfg: DiffConfig = DiffConfig()) -> dict:
    """Compare the theta split of the superfield residual with the component equations."""
    from . import pde

    worst_b = worst_f = 0.0
    for pt in points:
        r = superfield_residual(phi, p, pt, cfg)
        free, coef = split_theta(r, phi.theta)
        bos = as_grassmann(pde.susy_residual_bosonic(phi.B, phi.A, p, pt, cfg, ctx=phi.ctx), phi.ctx)
        fer = as_grassmann(pde.susy_residual_fermionic(phi.B, phi.A, p, pt, cfg, ctx=phi.ctx), phi.ctx)
        worst_b = max(worst_b, _finite((coef - bos).norm()))
        worst_f = max(worst_f, _finite((free - fer).norm()))
    return {
        "bosonic_gap": worst_b,
        "fermionic_gap": worst_f,
        "tolerance": cfg.tol,
        "passed": worst_b <= cfg.tol and worst_f <= cfg.tol,
    }


def susy_transform(phi: SuperField, eta: GrassmannNumber, sign: int = 1) -> SuperField:
    """Finite supersymmetry transform with odd constant ``eta``.

    Substituting x -> x - eta theta, theta -> theta + eta into A + theta B
    gives (A + eta B) + theta (B + eta A_x); ``sign=-1`` gives the
    opposite sign on the eta A_x term.
    """
    A = combination([(1.0, phi.A), (eta, phi.B)], label=f"{phi.A.label}+eta*{phi.B.label}")
    B = combination([(1.0, phi.B), (sign * eta, shifted(phi.A, (1, 0)))], label=f"{phi.B.label}+eta*d_x{phi.A.label}")
    return SuperField(A, B, phi.ctx, phi.kind, phi.theta)


# ----------------------------------------------------------- random polynomial superfields


def _falling(n: int, k: int) -> int:
    return factorial(n) // factorial(n - k) if k <= n else 0


def polynomial_field(coeffs, ctx: GeneratorSet, max_order: int = 5, label: str = "poly") -> FieldCandidate:
    """sum c_ij x^i y^j with Grassmann coefficients and every partial up to ``max_order`` registered."""
    coeffs = dict(coeffs)

    def make(di, dj):
        terms = [(c * _falling(i, di) * _falling(j, dj), i - di, j - dj) for (i, j), c in coeffs.items()
                 if i >= di and j >= dj]

        def f(x, y):
            out = ctx.zero()
            for c, i, j in terms:
                out = out + c * (x**i * y**j)
            return out

        return f

    derivs = {(i, j): make(i, j) for i in range(max_order + 1) for j in range(max_order + 1 - i) if i + j}
    return FieldCandidate(make(0, 0), derivs, label)


def random_superfield(ctx: GeneratorSet, rng, degree: int = 3, kind: Parity = Parity.ODD, density: float = 0.3) -> SuperField:
    """Phi = A + theta B with polynomial components of total degree ``degree``.

    A carries parity ``kind`` and B the opposite one; neither uses theta.
    """
    other = Parity.EVEN if kind is Parity.ODD else Parity.ODD
    monos = [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]
    ca = {m: random_element(ctx, rng, kind, density, exclude=(THETA,)) for m in monos}
    cb = {m: random_element(ctx, rng, other, density, exclude=(THETA,)) for m in monos}
    return SuperField(polynomial_field(ca, ctx, label="A"), polynomial_field(cb, ctx, label="B"), ctx, kind)


def operator_identities(phi: SuperField, points, cfg: DiffConfig = DiffConfig()) -> dict:
    """Largest norms of D^2 - d_x, H^2 + d_x and HD + DH applied to ``phi``."""
    DD, HH = apply_D(apply_D(phi)), apply_H(apply_H(phi))
    HD, DH = apply_H(apply_D(phi)), apply_D(apply_H(phi))
    dx = apply_dx(phi)
    gaps = {"D2": 0.0, "H2": 0.0, "HD+DH": 0.0}
    for pt in points:
        cache = JetCache(pt, cfg)
        ref = dx.value(cache)
        gaps["D2"] = max(gaps["D2"], (DD.value(cache) - ref).norm())
        gaps["H2"] = max(gaps["H2"], (HH.value(cache) + ref).norm())
        gaps["HD+DH"] = max(gaps["HD+DH"], (HD.value(cache) + DH.value(cache)).norm())
    return gaps
