"""Acceptance criteria, one test each.

Every test prints a single ``ACCEPT <n> PASS|FAIL`` line straight to the terminal
(capture is bypassed) before asserting, so the verdicts show up with or without ``-s``.
"""

import itertools
import math
import subprocess
import sys
import time

import mpmath
import numpy as np
import pytest

from susyflow import correspondences, solutions
from susyflow import symmetry as sym
from susyflow.grassmann import GeneratorSet, GrassmannNumber, g_mul
from susyflow.specfun import INV_E, ellip_E, ellip_F, lambert_w
from susyflow.superfield import SusyParams, decompose_check, operator_identities, random_superfield, standard_context

SMALL = ("theta", "e1", "e2", "e3", "e4")


@pytest.fixture
def verdict(capsys):
    def emit(n, name, ok, detail=""):
        with capsys.disabled():
            print(f"\nACCEPT {n:2d} {'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail

    return emit


# ------------------------------------------------------------ 1. Grassmann product vs permutation oracle


def _perm_product(m1, m2):
    seq = list(m1) + list(m2)
    if len(set(seq)) < len(seq):
        return 0, ()
    sign = 1
    for i in range(len(seq)):
        for j in range(len(seq) - 1 - i):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                sign = -sign
    return sign, tuple(seq)


def test_1_grassmann_oracle(verdict):
    ctx = GeneratorSet(tuple("abcdef"))
    monos = [c for r in range(7) for c in itertools.combinations(range(6), r)]
    t0 = time.perf_counter()
    bad = 0
    for m1 in monos:
        x = GrassmannNumber(ctx, {sum(1 << i for i in m1): 1.0})
        for m2 in monos:
            y = GrassmannNumber(ctx, {sum(1 << i for i in m2): 1.0})
            sign, m = _perm_product(m1, m2)
            want = GrassmannNumber(ctx, {sum(1 << i for i in m): sign}) if sign else ctx.zero()
            bad += g_mul(x, y) != want
    dt = time.perf_counter() - t0
    verdict(1, "grassmann oracle", bad == 0 and dt < 10, f"{len(monos) ** 2} pairs, {bad} mismatches, {dt:.2f} s")


# ------------------------------------------------------------ 2. operator identities


def test_2_operator_identities(verdict):
    rng = np.random.default_rng(0)
    ctx = standard_context(SMALL)
    worst = {"D2": 0.0, "H2": 0.0, "HD+DH": 0.0}
    for _ in range(100):
        gaps = operator_identities(random_superfield(ctx, rng), [tuple(rng.uniform(-1, 1, 2))])
        for k, v in gaps.items():
            worst[k] = max(worst[k], v)
    # every field carries analytic partials, so the identities must hold exactly
    verdict(2, "operator identities", all(v == 0 for v in worst.values()), f"100 fields, worst {worst}")


# ------------------------------------------------------------ 3. bracket tables and Jacobi


def test_3_tables(verdict):
    t0 = time.perf_counter()
    t1, t2 = sym.verify_table("classical-eps1"), sym.verify_table("susy")
    jac = [d for eps in (1, -1) for d in sym.jacobi_defects(sym.classical_generators(eps))]
    jac += sym.jacobi_defects(sym.susy_generators())
    dt = time.perf_counter() - t0
    ok = t1["passed"] and t2["passed"] and t1["cells"] == 25 and t2["cells"] == 49 and not jac and dt < 1
    verdict(3, "bracket tables", ok, f"{t1['cells']}+{t2['cells']} cells, jacobi defects {len(jac)}, {dt:.2f} s")


# ------------------------------------------------------------ 4. theta decomposition


def test_4_theta_decomposition(verdict):
    rng = np.random.default_rng(1)
    ctx = standard_context(SMALL)
    worst = 0.0
    for _ in range(50):
        phi = random_superfield(ctx, rng, density=0.5)
        for _ in range(5):
            p = SusyParams(*map(float, rng.uniform(-1, 1, 4)), epsilon=int(rng.choice([-1, 1])))
            r = decompose_check(phi, p, [tuple(rng.uniform(-1, 1, 2))])
            worst = max(worst, r["bosonic_gap"], r["fermionic_gap"])
    verdict(4, "theta decomposition", worst <= 1e-6, f"250 cases, worst gap {worst:.2e}")


# ------------------------------------------------------------ 5. classical solutions


def test_5_classical_suite(verdict):
    lines, ok = [], True
    for eid, params in (("kink", None), ("linear", None), ("linear", {"epsilon": -1}), ("elliptic", None)):
        inst = solutions.build(eid, params)
        rep = solutions.verify(inst)
        good = rep["max_residual"] <= 1e-6 and len(inst.points) + rep.get("points_excluded", 0) >= 400
        ok &= good
        lines.append(f"{eid}{'' if params is None else params}={rep['max_residual']:.1e}")
    lam = solutions.verify(solutions.build("lambert"))
    xis = solutions.build("lambert").xis
    ok &= lam["reduced_residual"] <= 1e-8 and min(xis) == 0.1 and max(xis) == 5.0
    lines.append(f"lambert reduced={lam['reduced_residual']:.1e}")
    verdict(5, "classical suite", ok, ", ".join(lines))


# ------------------------------------------------------------ 6. SUSY catalog


def test_6_susy_catalog(verdict):
    lines, ok = [], True
    susy = [e["id"] for e in solutions.list_catalog() if e["id"].startswith(("susy", "travelling", "fixed", "l8", "quadratic", "script", "transcendental"))]
    flagged = []
    for eid in susy:
        rep = solutions.verify(solutions.build(eid))
        ok &= rep["passed"] and rep["max_residual"] <= 1e-6
        lines.append(f"{eid}={rep['max_residual']:.1e}")
        if solutions.CATALOG[eid].classification == "verbatim-suspect":
            flagged.append(eid)
            # both readings are reported, and the one the entry relies on closes
            ok &= len(rep.get("variants", {})) >= 2 and min(rep["variants"].values()) <= 1e-6
    for profile in sorted(solutions.PROFILES):
        rep = solutions.verify(solutions.build("fixed_slope", {"profile": profile}))
        ok &= rep["passed"]
        lines.append(f"fixed_slope[{profile}]={rep['max_residual']:.1e}")
    ok &= len(solutions.PROFILES) >= 3
    om = solutions.verify(solutions.build("transcendental_omega"))["omega_residual"]
    ok &= om == 0.0
    ok &= bool(flagged)
    lines.append(f"omega={om}, verbatim-suspect entries reporting both readings: {flagged}")
    verdict(6, "susy catalog", ok, ", ".join(lines))


# ------------------------------------------------------------ 7. finite symmetries


def test_7_symmetry_invariance(verdict):
    lines, ok = [], True
    for eid in solutions.symmetry_applicable():
        r = solutions.symmetry_check(eid)
        ok &= r["passed"]
        ok &= all(a["parameter_values"] == 5 for a in r["actions"].values())
        lines.append(f"{eid}:{'ok' if r['passed'] else 'FAIL'}")
    m = solutions.symmetry_check("elliptic")["actions"]["M"]["status"]
    ok &= m == "xfail-confirmed"
    verdict(7, "symmetry invariance", ok, f"{' '.join(lines)}; rotation on elliptic: {m}")


# ------------------------------------------------------------ 8. correspondence web


def test_8_correspondence_web(verdict):
    pts = [(float(x), float(t)) for x in np.linspace(-1, 1, 5) for t in np.linspace(-1, 1, 5)]
    web = correspondences.web_check(pts)
    worst = max(web["residuals"].values())
    need = {"riemann_from_phi", "ma_roundtrip", "chaplygin", "utt_relation", "half_legendre"}
    ok = worst <= 1e-6 and need <= set(web["residuals"])
    verdict(8, "correspondence web", ok, f"{len(web['residuals'])} maps, worst {worst:.2e}")


# ------------------------------------------------------------ 9. special functions


def _quad_oracle(z, k, second=False):
    z, k = mpmath.mpc(z), mpmath.mpc(k)

    def f(t):
        a = z * t
        if second:
            return z * mpmath.sqrt(1 - k * k * a * a) / mpmath.sqrt(1 - a * a)
        return z / (mpmath.sqrt(1 - a * a) * mpmath.sqrt(1 - k * k * a * a))

    with mpmath.workdps(30):
        return complex(mpmath.quad(f, [0, 1]))


def _elliptic_samples(rng, n):
    out = [(0.4 + 0.3j, 1j), (-0.2 + 0.5j, 1j), (0.7, 1j)]
    while len(out) < n:
        z = complex(*rng.uniform(-0.8, 0.8, 2))
        k = complex(*rng.uniform(-1.2, 1.2, 2))
        # keep the segment [0, z] well away from the branch points 1/k and 1
        far = min(abs(1 - z * t) for t in np.linspace(0, 1, 41))
        far_k = min(abs(1 - k * z * t) for t in np.linspace(0, 1, 41))
        far_k = min(far_k, min(abs(1 + k * z * t) for t in np.linspace(0, 1, 41)))
        if far > 0.2 and far_k > 0.2:
            out.append((z, k))
    return out


def test_9_special_functions(verdict):
    rng = np.random.default_rng(9)
    principal = np.concatenate([-INV_E + np.logspace(-12, -0.01, 300) * INV_E, np.logspace(-8, 3, 700)])
    lower = -INV_E * np.concatenate([1 - np.logspace(-12, -0.01, 500), np.logspace(-300, -0.01, 500)])
    rt = 0.0
    for branch, xs in ((0, principal), (-1, lower)):
        assert len(xs) == 1000
        for x in xs:
            w = lambert_w(float(x), branch)
            r = abs(w * np.exp(w) - x) / abs(x)
            rt = max(rt, r if math.isfinite(r) else math.inf)
    samples = _elliptic_samples(rng, 100)
    el = 0.0
    for z, k in samples:
        el = max(el, abs(ellip_F(z, k) - _quad_oracle(z, k)), abs(ellip_E(z, k) - _quad_oracle(z, k, True)))
    ok = rt <= 1e-12 and el <= 1e-9 and any(k == 1j for _, k in samples)
    verdict(9, "special functions", ok, f"lambert round-trip {rt:.1e} (2x1000 pts), ellip vs quadrature {el:.1e} (100 samples)")


# ------------------------------------------------------------ 10. determinism


def test_10_cli_determinism(tmp_path, verdict):
    reports = [tmp_path / "a.json", tmp_path / "b.json"]
    procs = [
        subprocess.Popen([sys.executable, "-m", "susyflow", "verify", "all", "--seed", "3", "--fixed-clock", "--report", str(r)],
                         stdout=subprocess.DEVNULL, stderr=subprocess.PIPE)
        for r in reports
    ]
    codes = [p.wait(timeout=600) for p in procs]
    a, b = (r.read_bytes() for r in reports)
    ok = codes == [0, 0] and a == b and len(a) > 0
    verdict(10, "cli determinism", ok, f"exit codes {codes}, {len(a)} bytes, identical={a == b}")
