import pytest

from susyflow import symmetry as sym
from susyflow.calculus import FieldCandidate
from susyflow.grassmann import ParityError
from susyflow.superfield import standard_context


@pytest.mark.parametrize("algebra,cells", [("classical-eps1", 25), ("susy", 49)])
def test_tables_reproduced(algebra, cells):
    r = sym.verify_table(algebra)
    assert r["cells"] == cells
    assert r["passed"], r["mismatches"]


def test_jacobi_exact():
    assert sym.jacobi_defects(sym.classical_generators(1)) == []
    assert sym.jacobi_defects(sym.classical_generators(-1)) == []
    assert sym.jacobi_defects(sym.susy_generators()) == []


def test_structure_checks():
    assert sym.semidirect_check()["passed"]
    assert sym.solvability_check()["passed"]


def test_odd_generators_anticommute_to_zero():
    g = sym.susy_generators()
    for a in ("Y", "Q1", "Q2"):
        for b in ("Y", "Q1", "Q2"):
            assert sym.bracket(g[a], g[b]).is_zero()


def test_odd_generators_need_special_parameters():
    assert "Q1" not in sym.susy_generators(a=1)
    assert "Q2" not in sym.susy_generators(d=0.5)
    assert "Q1" in sym.susy_generators(c=1)


def test_bracket_antisymmetric_for_even():
    g = sym.classical_generators(1)
    for a in g.values():
        for b in g.values():
            assert sym.bracket(a, b) == -sym.bracket(b, a)


def test_in_span():
    g = sym.classical_generators(1)
    assert sym.in_span(g["T1"].scale(3) + g["T2"], [g["T1"], g["T2"]])
    assert not sym.in_span(g["S"], [g["T1"], g["T2"], g["T3"]])


@pytest.mark.parametrize("kind", ["classical", "susy"])
def test_flows_match_generators(kind):
    ctx = standard_context()
    for label, action in sym.standard_actions(kind).items():
        assert sym.validate_action(action, ctx=ctx) < 1e-7, label


def test_odd_action_needs_odd_parameter():
    acts = sym.standard_actions("susy")
    sol = (FieldCandidate(lambda x, y: x), FieldCandidate(lambda x, y: 0.0))
    with pytest.raises(ParityError):
        sym.act(acts["Y"], sol, 0.3)
    with pytest.raises(ParityError):
        sym.act(acts["P1"], sol, standard_context().gen("eta1"))


def test_sweep_on_plane_solution():
    from susyflow import pde

    plane = FieldCandidate(lambda x, y: 0.5 * x + 0.2 * y, label="plane")
    acts = sym.standard_actions("classical")

    def res(phi, psi, pt):
        return abs(pde.classical_residual(phi, 1, pt))

    out = sym.invariance_sweep((plane, None), acts, [(0.3, 0.4)], res, {k: [0.1, -0.2] for k in acts})
    assert out["passed"]
    # a non-symmetry that happens to hold is reported, not hidden
    out = sym.invariance_sweep((plane, None), acts, [(0.3, 0.4)], res, {k: [0.1] for k in acts}, expect_fail=("M",))
    assert out["actions"]["M"]["status"] == "unexpected-pass" and not out["passed"]


def test_sweep_nan_counts_as_failure():
    plane = FieldCandidate(lambda x, y: x, label="plane")
    acts = {"T1": sym.standard_actions("classical")["T1"]}
    vals = iter([0.0, float("nan")])
    out = sym.invariance_sweep((plane, None), acts, [(0.1, 0.1), (0.2, 0.2)], lambda a, b, pt: next(vals), {"T1": [0.1]})
    assert out["actions"]["T1"]["max_residual"] == float("inf")
    assert not out["passed"]
