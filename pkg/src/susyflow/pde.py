"""Residuals of the classical flow equation and of the two supersymmetric component equations.

Every component equation is stored as a term table. A term is a numeric
coefficient, a power of epsilon, an optional parameter factor (one of a, b,
c, d) and an ordered list of field partials. Factors multiply left to right
in the stored order, which matters for the odd field psi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .calculus import DiffConfig, FieldCandidate, JetCache
from .grassmann import GeneratorSet, GrassmannNumber, Parity, ParityError, g_parity


class Term(NamedTuple):
    coef: float
    eps_power: int
    param: str | None
    factors: tuple[tuple[str, tuple[int, int]], ...]


def _t(coef, eps, param, *factors):
    parsed = []
    for f in factors:
        name, idx = f.split("_") if "_" in f else (f, "")
        mi = (idx.count("x"), idx.count("y"))
        parsed.append(("phi" if name == "phi" else "psi", mi))
    return Term(coef, eps, param, tuple(parsed))


# theta-coefficient of the general superfield equation
BOSONIC_TERMS = (
    _t(1, 0, None, "phi_xx"),
    _t(-1, 1, None, "phi_x", "phi_x", "phi_xx"),
    _t(1, 1, "a", "phi_xx", "psi_x", "psi_xx"),
    _t(1, 1, "a", "phi_x", "psi_x", "psi_xxx"),
    _t(-2, 0, None, "phi_x", "phi_y", "phi_xy"),
    _t(2, 0, "b", "phi_xy", "psi_x", "psi_xy"),
    _t(2, 0, "b", "phi_y", "psi_x", "psi_xxy"),
    _t(2, 0, "c", "phi_xy", "psi_y", "psi_xx"),
    _t(2, 0, "c", "phi_x", "psi_y", "psi_xxy"),
    _t(-2, 0, None, "phi_y", "psi_xx", "psi_xy"),
    _t(2, 0, "b", "phi_y", "psi_xx", "psi_xy"),
    _t(2, 0, "c", "phi_y", "psi_xx", "psi_xy"),
    _t(1, 0, None, "phi_yy"),
    _t(-1, 1, None, "phi_y", "phi_y", "phi_yy"),
    _t(1, 1, "d", "phi_y", "psi_y", "psi_xyy"),
    _t(1, 1, "d", "phi_yy", "psi_y", "psi_xy"),
    _t(-2, 1, None, "phi_y", "psi_xy", "psi_yy"),
    _t(2, 1, "d", "phi_y", "psi_xy", "psi_yy"),
)

# theta-free part of the general superfield equation
FERMIONIC_TERMS = (
    _t(1, 0, None, "psi_xx"),
    _t(-1, 1, "a", "phi_x", "phi_xx", "psi_x"),
    _t(-1, 1, None, "phi_x", "phi_x", "psi_xx"),
    _t(1, 1, "a", "phi_x", "phi_x", "psi_xx"),
    _t(-2, 0, "b", "phi_y", "phi_xy", "psi_x"),
    _t(-2, 0, "c", "phi_x", "phi_xy", "psi_y"),
    _t(-2, 0, None, "phi_x", "phi_y", "psi_xy"),
    _t(2, 0, "b", "phi_x", "phi_y", "psi_xy"),
    _t(2, 0, "c", "phi_x", "phi_y", "psi_xy"),
    _t(1, 0, None, "psi_yy"),
    _t(-1, 1, "d", "phi_y", "phi_yy", "psi_y"),
    _t(-1, 1, None, "phi_y", "phi_y", "psi_yy"),
    _t(1, 1, "d", "phi_y", "phi_y", "psi_yy"),
)

# the a = b = c = d = 0 system, transcribed separately
SPECIAL_BOSONIC_TERMS = (
    _t(1, 0, None, "phi_xx"),
    _t(-1, 1, None, "phi_x", "phi_x", "phi_xx"),
    _t(-2, 0, None, "phi_x", "phi_y", "phi_xy"),
    _t(-2, 0, None, "phi_y", "psi_xx", "psi_xy"),
    _t(1, 0, None, "phi_yy"),
    _t(-1, 1, None, "phi_y", "phi_y", "phi_yy"),
    _t(-2, 1, None, "phi_y", "psi_xy", "psi_yy"),
)

SPECIAL_FERMIONIC_TERMS = (
    _t(1, 0, None, "psi_xx"),
    _t(-1, 1, None, "phi_x", "phi_x", "psi_xx"),
    _t(-2, 0, None, "phi_x", "phi_y", "psi_xy"),
    _t(1, 0, None, "psi_yy"),
    _t(-1, 1, None, "phi_y", "phi_y", "psi_yy"),
)


@dataclass(frozen=True)
class ResidualSample:
    point: tuple[float, float]
    value: object
    fd_error_estimate: float

    def __post_init__(self):
        if self.fd_error_estimate < 0:
            raise ValueError("error estimate must be non-negative")

    @property
    def magnitude(self) -> float:
        v = self.value
        return v.norm() if isinstance(v, GrassmannNumber) else abs(v)


def _param(p, name):
    if name is None:
        return 1.0
    return getattr(p, name)


def evaluate_terms(terms, values, p, epsilon: int):
    """Sum a term table given ``values[(field, mi)]`` and parameters ``p``."""
    total = 0j
    for term in terms:
        scale = term.coef * epsilon**term.eps_power * _param(p, term.param)
        if scale == 0:
            continue
        prod = 1.0
        for key in term.factors:
            prod = prod * values[key]
        total = total + scale * prod
    return total


def required_partials(terms) -> set[tuple[str, tuple[int, int]]]:
    return {f for t in terms for f in t.factors}


def _check_parity(v, want: Parity, name: str) -> None:
    if isinstance(v, GrassmannNumber):
        if not v.is_zero() and g_parity(v) is not want:
            raise ParityError(f"{name} must be {want.name.lower()}, found {g_parity(v).name.lower()}")
    elif want is Parity.ODD and v != 0:
        raise ParityError(f"{name} must be odd; a nonzero plain number is even")


def _component_values(terms, phi, psi, cache: JetCache):
    values = {}
    for name, mi in required_partials(terms):
        values[(name, mi)] = cache(phi if name == "phi" else psi, mi)
    _check_parity(cache(phi), Parity.EVEN, "phi")
    _check_parity(cache(psi), Parity.ODD, "psi")
    return values


def _finish(v, ctx: GeneratorSet | None):
    if ctx is not None and not isinstance(v, GrassmannNumber):
        return ctx.scalar(v)
    return v


def _evaluate(terms, phi, psi, p, epsilon, point, cfg, ctx):
    cache = JetCache(point, cfg)
    return _finish(evaluate_terms(terms, _component_values(terms, phi, psi, cache), p, epsilon), ctx)


def susy_residual_bosonic(phi: FieldCandidate, psi: FieldCandidate, p, point, cfg: DiffConfig = DiffConfig(), ctx=None):
    """Bosonic component equation with all parameter terms."""
    return _evaluate(BOSONIC_TERMS, phi, psi, p, p.epsilon, point, cfg, ctx)


def susy_residual_fermionic(phi: FieldCandidate, psi: FieldCandidate, p, point, cfg: DiffConfig = DiffConfig(), ctx=None):
    """Fermionic component equation with all parameter terms."""
    return _evaluate(FERMIONIC_TERMS, phi, psi, p, p.epsilon, point, cfg, ctx)


def special_residuals(phi: FieldCandidate, psi: FieldCandidate, epsilon: int, point, cfg: DiffConfig = DiffConfig(), ctx=None):
    """(bosonic, fermionic) residuals of the a = b = c = d = 0 system."""
    cache = JetCache(point, cfg)
    terms = SPECIAL_BOSONIC_TERMS + SPECIAL_FERMIONIC_TERMS
    values = _component_values(terms, phi, psi, cache)
    return (
        _finish(evaluate_terms(SPECIAL_BOSONIC_TERMS, values, None, epsilon), ctx),
        _finish(evaluate_terms(SPECIAL_FERMIONIC_TERMS, values, None, epsilon), ctx),
    )


def special_residual_estimate(phi, psi, epsilon: int, point, cfg: DiffConfig = DiffConfig(), ctx=None):
    """Both special residuals plus the largest Richardson error estimate of any partial used."""
    cache = JetCache(point, cfg)
    terms = SPECIAL_BOSONIC_TERMS + SPECIAL_FERMIONIC_TERMS
    values = _component_values(terms, phi, psi, cache)
    bos = _finish(evaluate_terms(SPECIAL_BOSONIC_TERMS, values, None, epsilon), ctx)
    fer = _finish(evaluate_terms(SPECIAL_FERMIONIC_TERMS, values, None, epsilon), ctx)
    return bos, fer, cache.max_error


def classical_jet(phi: FieldCandidate, point, cfg: DiffConfig = DiffConfig()):
    cache = JetCache(point, cfg)
    names = {"x": (1, 0), "y": (0, 1), "xx": (2, 0), "xy": (1, 1), "yy": (0, 2)}
    out = {k: _body(cache(phi, mi)) for k, mi in names.items()}
    return out, cache.max_error


def _body(v):
    if isinstance(v, GrassmannNumber):
        if not v.soul.is_zero():
            raise ParityError("classical field has a nilpotent part")
        return v.body
    return complex(v)


def classical_from_jet(j, epsilon: int) -> complex:
    return (
        (1 - epsilon * j["x"] ** 2) * j["xx"]
        - 2 * j["x"] * j["y"] * j["xy"]
        + (1 - epsilon * j["y"] ** 2) * j["yy"]
    )


def classical_residual(phi: FieldCandidate, epsilon: int, point, cfg: DiffConfig = DiffConfig()) -> complex:
    """(1 - eps phi_x^2) phi_xx - 2 phi_x phi_y phi_xy + (1 - eps phi_y^2) phi_yy."""
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    j, _ = classical_jet(phi, point, cfg)
    return classical_from_jet(j, epsilon)


def classical_sample(phi: FieldCandidate, epsilon: int, point, cfg: DiffConfig = DiffConfig()) -> ResidualSample:
    j, err = classical_jet(phi, point, cfg)
    # first-order error bound on the residual from the partial estimates
    scale = 2 + 2 * abs(j["x"]) * (abs(j["xx"]) + abs(j["y"])) + 2 * abs(j["y"]) * (abs(j["yy"]) + abs(j["x"]))
    scale += abs(j["x"]) ** 2 + abs(j["y"]) ** 2 + 2 * abs(j["xy"]) * (abs(j["x"]) + abs(j["y"]))
    return ResidualSample(tuple(point), classical_from_jet(j, epsilon), err * scale)


def statics_residual(phi: FieldCandidate, point, cfg: DiffConfig = DiffConfig()) -> complex:
    """(1 + phi_x^2) phi_xx - 2 phi_x phi_y phi_xy + (1 + phi_y^2) phi_yy, the capillary-statics form."""
    j, _ = classical_jet(phi, point, cfg)
    return (1 + j["x"] ** 2) * j["xx"] - 2 * j["x"] * j["y"] * j["xy"] + (1 + j["y"] ** 2) * j["yy"]
