"""Finite exterior (Grassmann) algebra with complex coefficients.

Monomials are bitmasks over an ordered :class:`GeneratorSet`; bit ``i`` set
means generator ``i`` is present, and every monomial is stored in ascending
generator order with the reordering sign folded into its coefficient.
Derivatives with respect to odd coordinates act from the left.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

MAX_GENERATORS = 16


class GrassmannError(Exception):
    pass


class ContextError(GrassmannError):
    """Operands live over different generator sets."""


class ParityError(GrassmannError):
    pass


class NoRootError(GrassmannError):
    pass


class SingularLinearizationError(GrassmannError):
    pass


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"
    MIXED = "mixed"

    def __mul__(self, other: "Parity") -> "Parity":
        if Parity.MIXED in (self, other):
            return Parity.MIXED
        return Parity.EVEN if self is other else Parity.ODD


@dataclass(frozen=True)
class GeneratorSet:
    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator labels in {names}")
        if len(names) > MAX_GENERATORS:
            raise ValueError(f"at most {MAX_GENERATORS} generators, got {len(names)}")

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}") from None

    def gen(self, name: str) -> "GrassmannNumber":
        return GrassmannNumber(self, {1 << self.index(name): 1.0})

    def gens(self, *names: str) -> tuple["GrassmannNumber", ...]:
        return tuple(self.gen(n) for n in names)

    def scalar(self, value: complex) -> "GrassmannNumber":
        return GrassmannNumber(self, {0: value})

    def zero(self) -> "GrassmannNumber":
        return GrassmannNumber(self, {})

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for n in names:
            m |= 1 << self.index(n)
        return m

    def monomial_label(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "*".join(self.names[i] for i in range(len(self.names)) if mask >> i & 1)


def reorder_sign(a: int, b: int) -> int:
    """Sign of moving monomial ``b`` past ``a`` into ascending order.

    Counts pairs (i in a, j in b) with i > j; each needs one transposition.
    """
    swaps = 0
    bb = b
    while bb:
        low = bb & -bb
        # generators of a above this generator of b
        swaps += bin(a & ~((low << 1) - 1)).count("1")
        bb ^= low
    return -1 if swaps & 1 else 1


def _clean(coeffs: Mapping[int, complex]) -> dict[int, complex]:
    return {k: complex(v) for k, v in coeffs.items() if v != 0}


@dataclass(frozen=True, eq=False)
class GrassmannNumber:
    ctx: GeneratorSet
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        limit = 1 << len(self.ctx)
        for k in self.coeffs:
            if not 0 <= k < limit:
                raise ValueError(f"monomial mask {k:#x} outside generator set")
        object.__setattr__(self, "coeffs", _clean(self.coeffs))

    # construction helpers

    def _coerce(self, other) -> "GrassmannNumber":
        if isinstance(other, GrassmannNumber):
            if other.ctx != self.ctx:
                raise ContextError(f"generator sets differ: {self.ctx.names} vs {other.ctx.names}")
            return other
        if isinstance(other, (int, float, complex)):
            return GrassmannNumber(self.ctx, {0: other})
        return NotImplemented

    # arithmetic

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return GrassmannNumber(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannNumber(self.ctx, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return GrassmannNumber(self.ctx, {k: v * other for k, v in self.coeffs.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[int, complex] = {}
        for ka, va in self.coeffs.items():
            for kb, vb in other.coeffs.items():
                if ka & kb:
                    continue
                k = ka | kb
                out[k] = out.get(k, 0) + reorder_sign(ka, kb) * va * vb
        return GrassmannNumber(self.ctx, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * (1.0 / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return self.apply(lambda b, k: _power_derivative(b, n, k))
        out = self.ctx.scalar(1.0)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, float, complex)):
            other = GrassmannNumber(self.ctx, {0: other})
        if not isinstance(other, GrassmannNumber):
            return NotImplemented
        return self.ctx == other.ctx and dict(self.coeffs) == dict(other.coeffs)

    def __hash__(self):
        return hash((self.ctx, frozenset(self.coeffs.items())))

    # structure

    @property
    def body(self) -> complex:
        return self.coeffs.get(0, 0j)

    @property
    def soul(self) -> "GrassmannNumber":
        return GrassmannNumber(self.ctx, {k: v for k, v in self.coeffs.items() if k})

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.coeffs.values())

    def norm(self) -> float:
        """Largest coefficient magnitude."""
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def parity(self) -> Parity:
        return g_parity(self)

    def degree_part(self, parity: Parity) -> "GrassmannNumber":
        want = 0 if parity is Parity.EVEN else 1
        return GrassmannNumber(self.ctx, {k: v for k, v in self.coeffs.items() if bin(k).count("1") % 2 == want})

    def coefficient(self, *names: str) -> complex:
        return self.coeffs.get(self.ctx.mask(names), 0j)

    def map_coeffs(self, fn: Callable[[complex], complex]) -> "GrassmannNumber":
        return GrassmannNumber(self.ctx, {k: fn(v) for k, v in self.coeffs.items()})

    def real(self) -> "GrassmannNumber":
        return self.map_coeffs(lambda v: v.real)

    def conj(self) -> "GrassmannNumber":
        return self.map_coeffs(lambda v: v.conjugate())

    def nilpotency_bound(self) -> int:
        """Smallest k with soul**k == 0 guaranteed by degree counting."""
        soul_degrees = [bin(k).count("1") for k in self.coeffs if k]
        if not soul_degrees:
            return 1
        return len(self.ctx) // min(soul_degrees) + 1

    def apply(self, derivative: Callable[[complex, int], complex]) -> "GrassmannNumber":
        """Extend an analytic function through its Taylor series at the body.

        ``derivative(b, k)`` must return the k-th derivative at ``b``; the
        series truncates because the soul is nilpotent.
        """
        b = self.body
        s = self.soul
        out = self.ctx.scalar(derivative(b, 0))
        term = self.ctx.scalar(1.0)
        fact = 1.0
        for k in range(1, self.nilpotency_bound()):
            term = term * s
            if term.is_zero():
                break
            fact *= k
            out = out + term * (derivative(b, k) / fact)
        return out

    def inverse(self) -> "GrassmannNumber":
        if self.body == 0:
            raise ZeroDivisionError("Grassmann number with zero body is not invertible")
        return self.apply(lambda b, k: (-1) ** k * math.factorial(k) / b ** (k + 1))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs, key=lambda m: (bin(m).count("1"), m)):
            v = self.coeffs[k]
            c = f"{v.real:.6g}" if v.imag == 0 else f"({v:.6g})"
            parts.append(c if k == 0 else f"{c}*{self.ctx.monomial_label(k)}")
        return " + ".join(parts)


def _power_derivative(b: complex, p: float, k: int) -> complex:
    coef = 1.0
    for j in range(k):
        coef *= p - j
    return coef * b ** (p - k)


def g_add(a: GrassmannNumber, b: GrassmannNumber) -> GrassmannNumber:
    return a + b


def g_mul(a: GrassmannNumber, b: GrassmannNumber) -> GrassmannNumber:
    return a * b


def g_parity(a: GrassmannNumber) -> Parity:
    degrees = {bin(k).count("1") % 2 for k in a.coeffs}
    if degrees <= {0}:
        return Parity.EVEN
    if degrees == {1}:
        return Parity.ODD
    return Parity.MIXED


# elementary functions on even elements


def g_exp(a: GrassmannNumber) -> GrassmannNumber:
    return a.apply(lambda b, k: cmath.exp(b))


def g_log(a: GrassmannNumber) -> GrassmannNumber:
    def d(b, k):
        if k == 0:
            return cmath.log(b)
        return (-1) ** (k - 1) * math.factorial(k - 1) / b**k

    return a.apply(d)


def g_sqrt(a: GrassmannNumber) -> GrassmannNumber:
    return g_pow(a, 0.5)


def g_pow(a: GrassmannNumber, p: float) -> GrassmannNumber:
    return a.apply(lambda b, k: _power_derivative(b, p, k))


def _complex_step(fn: Callable[[float], float], x: float, h: float = 1e-20) -> float:
    return (fn(complex(x, h)).imag) / h


def g_solve_implicit(
    relation: Callable[[GrassmannNumber], GrassmannNumber],
    seed: float,
    ctx: GeneratorSet,
    *,
    tol: float = 1e-13,
) -> GrassmannNumber:
    """Solve ``relation(w) == 0`` for an even Grassmann unknown ``w``.

    The body is found by a scalar root search from ``seed``; the soul by
    nilpotent Newton steps that linearise about the body. Each step raises
    the lowest surviving soul degree, so the loop ends within
    ``len(ctx)`` iterations.
    """
    from scipy.optimize import newton

    def body_fn(b):
        return relation(ctx.scalar(b)).body

    def body_real(b):
        return body_fn(b).real

    def body_deriv(b):
        return _complex_step(body_fn, b)

    try:
        root = newton(body_real, seed, fprime=body_deriv, tol=1e-15, maxiter=100)
    except RuntimeError as exc:
        raise NoRootError(f"body relation did not converge from seed {seed}") from exc
    if not math.isfinite(root) or abs(body_fn(root)) > 1e-10 * max(1.0, abs(root)):
        raise NoRootError(f"body relation has no root near {seed}")
    jac = body_deriv(root)
    if abs(jac) < 1e-14:
        raise SingularLinearizationError(f"relation derivative vanishes at body root {root}")

    w = ctx.scalar(root)
    for _ in range(len(ctx) + 2):
        r = relation(w).soul
        if r.is_zero(tol):
            return w
        w = w - r / jac
    r = relation(w).soul
    if not r.is_zero(tol):
        raise NoRootError("nilpotent Newton iteration did not terminate")
    return w


def random_element(
    ctx: GeneratorSet,
    rng,
    parity: Parity | None = None,
    density: float = 0.5,
    exclude: Sequence[str] = (),
    scale: float = 1.0,
) -> GrassmannNumber:
    """Random element with pure ``parity`` (or mixed when None).

    Generators named in ``exclude`` never appear.
    """
    banned = ctx.mask(exclude)
    coeffs = {}
    for k in range(1 << len(ctx)):
        if k & banned:
            continue
        deg = bin(k).count("1")
        if parity is Parity.EVEN and deg % 2:
            continue
        if parity is Parity.ODD and deg % 2 == 0:
            continue
        if rng.random() < density:
            coeffs[k] = scale * rng.uniform(-1, 1)
    return GrassmannNumber(ctx, coeffs)
