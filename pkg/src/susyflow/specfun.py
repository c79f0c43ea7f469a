"""Lambert W and incomplete elliptic integrals along straight complex paths."""

from __future__ import annotations

import cmath
import math

import numpy as np

INV_E = math.exp(-1.0)


class DomainError(ValueError):
    pass


class SingularPathError(ValueError):
    pass


# ---------------------------------------------------------------- Lambert W


def _lambert_seeds(z: complex, branch: int) -> list[complex]:
    p = cmath.sqrt(2.0 * (math.e * z + 1.0))
    if branch == 0:
        seeds = []
        if abs(z) < 0.5:
            # Pade approximant around the origin
            seeds.append(z * (3.0 + 6.0 * z + z * z) / (3.0 + 9.0 * z + 5.0 * z * z))
        if abs(z + INV_E) < 1.0:
            seeds.append(-1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3)
        # Winitzki's global approximation
        l1 = cmath.log(1.0 + z) if z != -1 else complex(0.0, math.pi)
        seeds.append(l1 * (1.0 - cmath.log(1.0 + l1) / (2.0 + l1)))
        lz = cmath.log(z)
        seeds.append(lz - cmath.log(lz) if abs(lz) > 1e-3 else lz)
        return seeds
    seeds = []
    if abs(z + INV_E) < 0.3 and z.imag >= 0.0:
        seeds.append(-1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p**3)
    if abs(z) < 0.3 and z.real < 0 and z.imag == 0.0:
        lz = math.log(-z.real)
        seeds.append(complex(lz - math.log(-lz)))
    lz = cmath.log(z) - 2j * math.pi
    seeds.append(lz - cmath.log(lz))
    return seeds


def _in_branch(w: complex, branch: int) -> bool:
    """Membership of ``w`` in the image of branch 0 or -1."""
    x, y = w.real, w.imag
    tol = 1e-12 * (1.0 + abs(w))
    if abs(y) <= tol:
        return x >= -1.0 - tol if branch == 0 else x <= -1.0 + tol
    # boundary curve x = -y cot(y)
    edge = -y / math.tan(y) if abs(math.sin(y)) > 1e-300 else -math.inf
    if branch == 0:
        return -math.pi < y < math.pi and x > edge - tol
    if -math.pi < y < 0:
        return x < edge + tol
    if -2.0 * math.pi < y <= -math.pi:
        return x > edge - tol or y == -math.pi
    return False


def _halley(z: complex, w: complex, maxiter: int = 100) -> complex:
    for _ in range(maxiter):
        ew = cmath.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0:
            break
        step = f / denom
        w -= step
        if abs(step) <= 1e-15 * (1.0 + abs(w)):
            break
    return w


def lambert_w(x, branch: int = 0) -> complex:
    """Lambert W on branch 0 or -1, by Halley iteration.

    A real ``x`` (int or float) is held to the real branches: branch 0
    needs ``x >= -1/e`` and branch -1 needs ``-1/e <= x < 0``. Pass a
    ``complex`` to evaluate the complex branch anywhere.
    """
    if branch not in (0, -1):
        raise ValueError(f"only branches 0 and -1 are supported, got {branch}")
    real_input = isinstance(x, (int, float, np.floating, np.integer)) and not isinstance(x, bool)
    if real_input:
        xv = float(x)
        if xv < -INV_E:
            raise DomainError(f"x = {xv} < -1/e has no real Lambert W")
        if branch == -1 and xv >= 0:
            raise DomainError("branch -1 is real only on [-1/e, 0)")
        if xv == -INV_E:
            return complex(-1.0)
    z = complex(x)
    if z == 0:
        if branch == 0:
            return 0j
        raise DomainError("W_{-1}(0) is -infinity")
    w = None
    for seed in _lambert_seeds(z, branch):
        try:
            w = _halley(z, seed)
        except (OverflowError, ZeroDivisionError):
            # a seed near a pole of its approximant can diverge; try the next
            continue
        if _in_branch(w, branch) and abs(w * cmath.exp(w) - z) <= 1e-12 * max(1.0, abs(z)):
            break
    if w is None:
        raise DomainError(f"Halley iteration diverged from every seed at {z}")
    if real_input:
        w = complex(w.real, 0.0)
    return w


# ------------------------------------------------------ elliptic integrals

# Gauss-Kronrod 7/15 nodes on [-1, 1]
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def gauss_kronrod(fn, a: float, b: float, tol: float = 1e-13, max_depth: int = 40) -> complex:
    """Adaptive G7-K15 quadrature of a vectorised complex integrand on [a, b]."""
    total = 0j
    stack = [(a, b, 0)]
    while stack:
        lo, hi, depth = stack.pop()
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        vals = fn(mid + half * _NODES)
        k = half * np.dot(_KWEIGHTS, vals)
        g = half * np.dot(_GWEIGHTS, vals)
        if abs(k - g) <= max(tol * abs(k), tol * (hi - lo)) or depth >= max_depth:
            if not np.isfinite(k):
                raise SingularPathError("integrand is not finite on the path")
            total += k
        else:
            stack.append((lo, mid, depth + 1))
            stack.append((mid, hi, depth + 1))
    return total


def _check_path(z: complex, k: complex, tol: float = 1e-12) -> None:
    branch_points = [1.0, -1.0]
    if k != 0:
        branch_points += [1.0 / k, -1.0 / k]
    for p in branch_points:
        p = complex(p)
        if z == 0:
            return
        # projection of p onto the segment [0, z]
        t = (p * z.conjugate()).real / abs(z) ** 2
        t = min(max(t, 0.0), 1.0)
        if abs(p - t * z) <= tol * max(1.0, abs(p)):
            raise SingularPathError(f"path [0, {z}] meets branch point {p}")


def _sqrt(v):
    return np.sqrt(np.asarray(v, dtype=complex))


def ellip_F(z: complex, k: complex) -> complex:
    """Incomplete elliptic integral of the first kind along the segment [0, z].

    Square roots take the principal branch factor by factor.
    """
    z = complex(z)
    k = complex(k)
    if z == 0:
        return 0j
    _check_path(z, k)

    def integrand(t):
        a = z * t
        return z / (_sqrt(1.0 - a * a) * _sqrt(1.0 - k * k * a * a))

    return complex(gauss_kronrod(integrand, 0.0, 1.0))


def ellip_E(z: complex, k: complex) -> complex:
    """Incomplete elliptic integral of the second kind along [0, z]."""
    z = complex(z)
    k = complex(k)
    if z == 0:
        return 0j
    _check_path(z, k)

    def integrand(t):
        a = z * t
        return z * _sqrt(1.0 - k * k * a * a) / _sqrt(1.0 - a * a)

    return complex(gauss_kronrod(integrand, 0.0, 1.0))


def ellip_F_minus_E(z: complex, k: complex) -> complex:
    """F - E as the integral of the integrand difference.

    The difference integrand is k^2 a^2 / (sqrt(1-a^2) sqrt(1-k^2 a^2)).
    """
    z = complex(z)
    k = complex(k)
    if z == 0:
        return 0j
    _check_path(z, k)

    def integrand(t):
        a = z * t
        return z * k * k * a * a / (_sqrt(1.0 - a * a) * _sqrt(1.0 - k * k * a * a))

    return complex(gauss_kronrod(integrand, 0.0, 1.0))
