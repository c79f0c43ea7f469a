"""Polynomial vector fields on (x, y, phi, psi), their brackets, and finite group actions."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Mapping

from .calculus import DiffConfig, FieldCandidate
from .grassmann import GrassmannNumber, Parity, ParityError, g_parity

VARS = ("x", "y", "phi", "psi")

Exponent = tuple[int, int, int, int]


def _zero(c) -> bool:
    if isinstance(c, GrassmannNumber):
        return c.is_zero()
    return c == 0


@dataclass(frozen=True)
class Poly:
    """Polynomial in (x, y, phi, psi) with exact or Grassmann coefficients."""

    terms: Mapping[Exponent, object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(k): v for k, v in sorted(self.terms.items()) if not _zero(v)}
        object.__setattr__(self, "terms", clean)

    @staticmethod
    def const(c) -> "Poly":
        return Poly({(0, 0, 0, 0): c})

    @staticmethod
    def var(name: str, c=1) -> "Poly":
        e = [0, 0, 0, 0]
        e[VARS.index(name)] = 1
        return Poly({tuple(e): c})

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, c) -> "Poly":
        return Poly({k: c * v for k, v in self.terms.items()})

    def __mul__(self, other: "Poly") -> "Poly":
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out[k] + va * vb if k in out else va * vb
        return Poly(out)

    def diff(self, var: int) -> "Poly":
        out = {}
        for k, v in self.terms.items():
            if k[var]:
                e = list(k)
                e[var] -= 1
                out[tuple(e)] = k[var] * v
        return Poly(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(_zero(self.terms.get(k, 0) - other.terms.get(k, 0)) for k in keys)

    def __hash__(self):
        return hash(tuple(self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, vals) -> object:
        total = 0
        for k, v in self.terms.items():
            m = v
            for base, e in zip(vals, k):
                if e:
                    m = m * base**e
            total = total + m
        return total

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms.items():
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in zip(VARS, k) if e)
            parts.append(f"{v}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


@dataclass(frozen=True)
class SymmetryGenerator:
    coeffs: tuple[Poly, Poly, Poly, Poly]
    label: str = ""
    odd: bool = False

    def apply(self, f: Poly) -> Poly:
        """Action on a function as a first-order differential operator."""
        out = Poly()
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                out = out + c * f.diff(i)
        return out

    def __add__(self, other: "SymmetryGenerator") -> "SymmetryGenerator":
        return SymmetryGenerator(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), f"{self.label}+{other.label}")

    def scale(self, c) -> "SymmetryGenerator":
        return SymmetryGenerator(tuple(a.scale(c) for a in self.coeffs), f"{c}*{self.label}")

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymmetryGenerator):
            return NotImplemented
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __str__(self):
        parts = [f"({c})d_{v}" for c, v in zip(self.coeffs, VARS) if not c.is_zero()]
        return " + ".join(parts) or "0"


def vector_field(label: str = "", odd: bool = False, **coeffs) -> SymmetryGenerator:
    polys = tuple(coeffs.get(v, Poly()) for v in VARS)
    return SymmetryGenerator(polys, label, odd)


def bracket(X: SymmetryGenerator, Y: SymmetryGenerator) -> SymmetryGenerator:
    """Ordinary commutator [X, Y] = X(Y^i) - Y(X^i) on each coefficient."""
    coeffs = tuple(X.apply(b) - Y.apply(a) for a, b in zip(X.coeffs, Y.coeffs))
    return SymmetryGenerator(coeffs, f"[{X.label},{Y.label}]")


H = Fraction(1, 2)
x, y, phi, psi = (Poly.var(v) for v in VARS)
one = Poly.const(1)


def classical_generators(epsilon: int = 1) -> dict[str, SymmetryGenerator]:
    """Symmetries of the classical equation; the rotation exists only for epsilon = 1."""
    gens = {
        "S": vector_field("S", x=x, y=y, phi=phi),
        "M": vector_field("M", x=-y, y=x),
        "T1": vector_field("T1", x=one),
        "T2": vector_field("T2", y=one),
        "T3": vector_field("T3", phi=one),
    }
    if epsilon == -1:
        del gens["M"]
        gens = {"S": gens["S"], "t1": gens["T1"], "t2": gens["T2"], "t3": gens["T3"]}
    return gens


def susy_generators(a=0, b=0, c=0, d=0) -> dict[str, SymmetryGenerator]:
    """Point symmetries of the component system; Q1 needs a = b = 0 and Q2 needs c = d = 0."""
    gens = {
        "S": vector_field("S", x=x, y=y, phi=phi, psi=psi.scale(Fraction(3, 2))),
        "P1": vector_field("P1", x=one),
        "P2": vector_field("P2", y=one),
        "Z": vector_field("Z", phi=one),
        "Y": vector_field("Y", odd=True, psi=one),
    }
    if a == 0 and b == 0:
        gens["Q1"] = vector_field("Q1", odd=True, psi=x)
    if c == 0 and d == 0:
        gens["Q2"] = vector_field("Q2", odd=True, psi=y)
    return gens


# printed commutation tables: row label -> column label -> {generator: coefficient}
CLASSICAL_TABLE = {
    "S": {"S": {}, "M": {}, "T1": {"T1": -1}, "T2": {"T2": -1}, "T3": {"T3": -1}},
    "M": {"S": {}, "M": {}, "T1": {"T2": -1}, "T2": {"T1": 1}, "T3": {}},
    "T1": {"S": {"T1": 1}, "M": {"T2": 1}, "T1": {}, "T2": {}, "T3": {}},
    "T2": {"S": {"T2": 1}, "M": {"T1": -1}, "T1": {}, "T2": {}, "T3": {}},
    "T3": {"S": {"T3": 1}, "M": {}, "T1": {}, "T2": {}, "T3": {}},
}

_SUSY_COLS = ("S", "P1", "P2", "Z", "Y", "Q1", "Q2")
SUSY_TABLE = {
    "S": dict(zip(_SUSY_COLS, ({}, {"P1": -1}, {"P2": -1}, {"Z": -1}, {"Y": -Fraction(3, 2)}, {"Q1": -H}, {"Q2": -H}))),
    "P1": dict(zip(_SUSY_COLS, ({"P1": 1}, {}, {}, {}, {}, {"Y": 1}, {}))),
    "P2": dict(zip(_SUSY_COLS, ({"P2": 1}, {}, {}, {}, {}, {}, {"Y": 1}))),
    "Z": dict(zip(_SUSY_COLS, ({"Z": 1}, {}, {}, {}, {}, {}, {}))),
    "Y": dict(zip(_SUSY_COLS, ({"Y": Fraction(3, 2)}, {}, {}, {}, {}, {}, {}))),
    "Q1": dict(zip(_SUSY_COLS, ({"Q1": H}, {"Y": -1}, {}, {}, {}, {}, {}))),
    "Q2": dict(zip(_SUSY_COLS, ({"Q2": H}, {}, {"Y": -1}, {}, {}, {}, {}))),
}


def combine(gens: Mapping[str, SymmetryGenerator], combo: Mapping[str, object]) -> SymmetryGenerator:
    out = vector_field("0")
    for name, c in combo.items():
        out = out + gens[name].scale(c)
    return out


def verify_table(algebra: str) -> dict:
    """Compare every printed cell with the computed bracket."""
    if algebra == "classical-eps1":
        gens, table = classical_generators(1), CLASSICAL_TABLE
    elif algebra == "susy":
        gens, table = susy_generators(), SUSY_TABLE
    else:
        raise ValueError(f"unknown algebra {algebra!r}")
    cells, mismatches, antisym = 0, [], []
    for r, row in table.items():
        for c, expected in row.items():
            cells += 1
            got = bracket(gens[r], gens[c])
            if not got == combine(gens, expected):
                mismatches.append({"row": r, "col": c, "expected": expected, "got": str(got)})
            if not combine(gens, expected) == -combine(gens, table[c][r]):
                antisym.append((r, c))
    return {
        "algebra": algebra,
        "cells": cells,
        "matched": cells - len(mismatches),
        "mismatches": mismatches,
        "antisymmetry_violations": antisym,
        "passed": not mismatches and not antisym,
    }


def jacobi_defects(gens: Mapping[str, SymmetryGenerator]) -> list[tuple[str, str, str]]:
    bad = []
    for (a, X), (b, Y), (c, Z) in combinations(gens.items(), 3):
        s = bracket(bracket(X, Y), Z) + bracket(bracket(Y, Z), X) + bracket(bracket(Z, X), Y)
        if not s.is_zero():
            bad.append((a, b, c))
    return bad


def _vectorize(g: SymmetryGenerator) -> dict:
    return {(i, k): v for i, p in enumerate(g.coeffs) for k, v in p.terms.items()}


def in_span(target: SymmetryGenerator, basis: list[SymmetryGenerator]) -> bool:
    """Exact membership test by Gaussian elimination over the rationals."""
    keys = sorted({k for g in basis + [target] for k in _vectorize(g)})
    cols = [_vectorize(g) for g in basis]
    rhs = _vectorize(target)
    rows = [[Fraction(c.get(k, 0)) for c in cols] + [Fraction(rhs.get(k, 0))] for k in keys]
    n = len(basis)
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col] / rows[r][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return all(any(v != 0 for v in row[:n]) or row[n] == 0 for row in rows)


def semidirect_check() -> dict:
    """{S, M} acting on the abelian ideal {T1, T2, T3} for epsilon = 1."""
    g = classical_generators(1)
    ideal = [g["T1"], g["T2"], g["T3"]]
    abelian = all(bracket(a, b).is_zero() for a, b in combinations(ideal, 2))
    lands = all(in_span(bracket(g[s], t), ideal) for s in ("S", "M") for t in ideal)
    return {"ideal_abelian": abelian, "action_in_ideal": lands, "passed": abelian and lands}


def solvability_check() -> dict:
    """Derived series of the epsilon = -1 algebra reaches zero in two steps."""
    g = classical_generators(-1)
    basis = list(g.values())
    first = [bracket(a, b) for a, b in combinations(basis, 2)]
    ts = [g["t1"], g["t2"], g["t3"]]
    in_t = all(in_span(d, ts) for d in first)
    second = [bracket(a, b) for a, b in combinations(first, 2)]
    vanishes = all(d.is_zero() for d in second)
    return {"derived_in_translations": in_t, "second_derived_zero": vanishes, "passed": in_t and vanishes}


# ---------------------------------------------------------------- actions


@dataclass(frozen=True)
class FiniteAction:
    """Closed-form flow of a generator.

    ``base_inverse(t, x, y)`` returns the preimage point and
    ``fiber(t, x, y, phi, psi)`` the transformed dependent values at the
    original point, so a solution transforms as
    phi'(x', y') = fiber(t, pre(x', y'), phi(pre), psi(pre)).
    """

    label: str
    generator: SymmetryGenerator
    base_forward: Callable
    base_inverse: Callable
    fiber: Callable
    odd: bool = False

    def point_map(self, t, X, Y, Phi, Psi):
        x2, y2 = self.base_forward(t, X, Y)
        p2, s2 = self.fiber(t, X, Y, Phi, Psi)
        return x2, y2, p2, s2


def _check_param(action: FiniteAction, t) -> None:
    if action.odd:
        if not isinstance(t, GrassmannNumber) or (not t.is_zero() and g_parity(t) is not Parity.ODD):
            raise ParityError(f"{action.label} needs an odd Grassmann parameter")
    elif isinstance(t, GrassmannNumber):
        raise ParityError(f"{action.label} needs a real parameter")


def act(action: FiniteAction, sol, t):
    """Transform the solution ``(phi, psi)``; ``psi`` may be None for classical fields."""
    _check_param(action, t)
    phi_f, psi_f = sol

    def pull(xx, yy):
        X, Y = action.base_inverse(t, xx, yy)
        P = phi_f.eval(X, Y)
        S = psi_f.eval(X, Y) if psi_f is not None else 0.0
        return action.fiber(t, X, Y, P, S)

    new_phi = FieldCandidate(lambda xx, yy: pull(xx, yy)[0], label=f"{action.label}({t})[{phi_f.label}]")
    if psi_f is None:
        return new_phi, None
    new_psi = FieldCandidate(lambda xx, yy: pull(xx, yy)[1], label=f"{action.label}({t})[{psi_f.label}]", parity=Parity.ODD)
    return new_phi, new_psi


def _ident(t, X, Y):
    return X, Y


def _same(t, X, Y, P, S):
    return P, S


def standard_actions(kind: str = "susy") -> dict[str, FiniteAction]:
    """Closed-form flows; ``kind`` is 'classical' (epsilon = 1 set) or 'susy'."""
    acts = {}
    if kind == "classical":
        g = classical_generators(1)
        acts["S"] = FiniteAction("S", g["S"], lambda t, X, Y: (math.exp(t) * X, math.exp(t) * Y),
                                 lambda t, X, Y: (math.exp(-t) * X, math.exp(-t) * Y),
                                 lambda t, X, Y, P, S: (math.exp(t) * P, S))
        acts["M"] = FiniteAction("M", g["M"],
                                 lambda t, X, Y: (X * math.cos(t) - Y * math.sin(t), X * math.sin(t) + Y * math.cos(t)),
                                 lambda t, X, Y: (X * math.cos(t) + Y * math.sin(t), -X * math.sin(t) + Y * math.cos(t)),
                                 _same)
        names = {"T1": "T1", "T2": "T2", "T3": "T3"}
    else:
        g = susy_generators()
        acts["S"] = FiniteAction("S", g["S"], lambda t, X, Y: (math.exp(t) * X, math.exp(t) * Y),
                                 lambda t, X, Y: (math.exp(-t) * X, math.exp(-t) * Y),
                                 lambda t, X, Y, P, S: (math.exp(t) * P, math.exp(1.5 * t) * S))
        names = {"T1": "P1", "T2": "P2", "T3": "Z"}
    acts[names["T1"]] = FiniteAction(names["T1"], g[names["T1"]], lambda t, X, Y: (X + t, Y), lambda t, X, Y: (X - t, Y), _same)
    acts[names["T2"]] = FiniteAction(names["T2"], g[names["T2"]], lambda t, X, Y: (X, Y + t), lambda t, X, Y: (X, Y - t), _same)
    acts[names["T3"]] = FiniteAction(names["T3"], g[names["T3"]], _ident, _ident, lambda t, X, Y, P, S: (P + t, S))
    if kind == "susy":
        acts["Y"] = FiniteAction("Y", g["Y"], _ident, _ident, lambda t, X, Y, P, S: (P, S + t), odd=True)
        acts["Q1"] = FiniteAction("Q1", g["Q1"], _ident, _ident, lambda t, X, Y, P, S: (P, S + t * X), odd=True)
        acts["Q2"] = FiniteAction("Q2", g["Q2"], _ident, _ident, lambda t, X, Y, P, S: (P, S + t * Y), odd=True)
    return acts


def elliptic_classical_actions() -> dict[str, FiniteAction]:
    """Actions used against the epsilon = -1 equation, including the rotation it lacks."""
    return standard_actions("classical")


def _coeff_values(gen: SymmetryGenerator, pt) -> list:
    return [c.evaluate(pt) for c in gen.coeffs]


def validate_action(action: FiniteAction, point=(0.7, -0.4, 0.3, 0.0), ctx=None, odd_name: str = "eta1", h: float = 1e-4) -> float:
    """Largest gap between the flow's t-derivative at 0 and the generator coefficients.

    Even flows are differenced in t; odd flows are linear in t, so the
    coefficient of a single odd generator is read off exactly.
    """
    X, Y, P, S = point
    expected = _coeff_values(action.generator, point)
    if action.odd:
        if ctx is None:
            raise ValueError("odd actions need a generator set")
        eta = ctx.gen(odd_name)
        S0 = ctx.scalar(S)
        moved = action.point_map(eta, X, Y, P, S0)
        base = action.point_map(ctx.zero(), X, Y, P, S0)
        gap = 0.0
        for m, b, e in zip(moved, base, expected):
            diff = m - b
            got = diff.coefficient(odd_name) if isinstance(diff, GrassmannNumber) else diff
            gap = max(gap, abs(got - complex(e)))
        return gap
    plus = action.point_map(h, X, Y, P, S)
    minus = action.point_map(-h, X, Y, P, S)
    ident = action.point_map(0.0, X, Y, P, S)
    gap = max(abs(a - b) for a, b in zip(ident, point))
    for p, m, e in zip(plus, minus, expected):
        gap = max(gap, abs((p - m) / (2 * h) - complex(e)))
    return gap


def invariance_sweep(sol, actions: Mapping[str, FiniteAction], points, residual: Callable, params, tol: float = 1e-6, expect_fail=()) -> dict:
    """Residual of transformed solutions over a grid for each action and parameter value.

    ``residual(phi, psi, point)`` returns a magnitude; ``params`` maps an
    action label to its parameter values. Labels in ``expect_fail`` are
    non-symmetries whose breakage is confirmed rather than counted.
    """
    out = {}
    ok = True
    for label, action in actions.items():
        worst = 0.0
        for t in params[label]:
            new = act(action, sol, t)
            for pt in points:
                r = residual(new[0], new[1], pt)
                worst = max(worst, r if math.isfinite(r) else math.inf)
        if label in expect_fail:
            status = "xfail-confirmed" if worst > tol else "unexpected-pass"
            ok = ok and status == "xfail-confirmed"
        else:
            status = "pass" if worst <= tol else "fail"
            ok = ok and status == "pass"
        out[label] = {"max_residual": worst, "status": status, "parameter_values": len(params[label])}
    return {"actions": out, "passed": ok}
