import itertools
import random
from fractions import Fraction

import pytest

from plumbsw import fixtures as fx
from plumbsw import series
from plumbsw.errors import (
    ComponentNotRational,
    IdentityViolation,
    MethodPreconditionFailed,
)
from plumbsw.graph import class_of, dual_restrict, minimal_s_rep
from plumbsw.sw import (
    component_term,
    counting_surgery_sweep,
    pc_reduced,
    quad_term,
    quasipoly_full,
    quasipoly_reduced,
    reduction_rational,
    sw_invariant,
    sw_table,
    verify_counting_surgery,
    verify_pc_surgery,
)


def test_sw_single3_trivial_class(single3):
    rec = sw_invariant(single3, single3.zero())
    assert rec.sw == Fraction(-1, 12)
    assert rec.normalized_r == 0
    assert rec.normalized_s == 0


def test_sw_single3_shifted_class_value(single3):
    # the class of -2E* with the quadratic normalization taken at -2E* itself
    v = single3.from_dual_coords([-2])
    rec = sw_invariant(single3, class_of(v))
    assert rec.sw + quad_term(single3, v) == -1


def test_sw_e8(e8):
    rec = sw_invariant(e8, e8.zero())
    assert rec.sw == -1
    assert rec.normalized_r == 0


def test_sw_depth_stability_external(showcase2):
    # recompute two levels deeper than the cached table and compare
    for key in showcase2.classes().reps_scaled:
        rec = sw_invariant(showcase2, key)
        x = showcase2.deep_point(key, rec.depth_used + 2)
        q = series.counting_full(showcase2, x)
        assert -q - quad_term(showcase2, x) == rec.sw


def test_quasipoly_full_matches_counting_deep(showcase2):
    g = showcase2
    for key in g.classes().reps_scaled[:6]:
        qp = quasipoly_full(g, key)
        x = g.deep_point(key, 2)
        l = x - g.rep_from_key(key)
        assert qp.evaluate(l) == series.counting_full(g, x)


def test_quasipoly_full_constant_is_pc(showcase2):
    for key in showcase2.classes().reps_scaled[:4]:
        qp = quasipoly_full(showcase2, key)
        rec = sw_invariant(showcase2, key)
        assert qp.pc() == -rec.normalized_r


def test_quasipoly_e8_closed_form(e8):
    qp = quasipoly_full(e8, e8.zero())
    rng = random.Random(2)
    for _ in range(5):
        l = e8.vector([rng.randint(0, 3) for _ in range(8)])
        assert qp.evaluate(l) == -Fraction(l.pair(l), 2)


def test_quasipoly_reduced_matches_counting_deep(showcase2):
    g = showcase2
    subset = (1, 2)
    for key in g.classes().reps_scaled[:6]:
        qp = quasipoly_reduced(g, key, subset)
        for depth in (1, 2):
            x = g.deep_point(key, depth)
            l = x - g.rep_from_key(key)
            assert qp.evaluate(l) == series.counting_reduced(g, x, subset)
    assert qp.constant_by_class


def test_quasipoly_reduced_full_subset_degenerates(showcase2):
    key = showcase2.classes().reps_scaled[3]
    assert (quasipoly_reduced(showcase2, key, range(showcase2.n)).pc()
            == quasipoly_full(showcase2, key).pc())


def test_component_term_of_showcase_class(showcase2):
    rh = showcase2.vector(fx.SHOWCASE_STAR_CLASS)
    forest = showcase2.components_minus((1, 2, 3, 4))
    comp, origin = forest.components[0], forest.origins[0]
    y = dual_restrict(rh, comp, origin)
    assert y.coords == (Fraction(-2, 3),)
    assert component_term(comp, y) == -1


def test_counting_surgery_showcases(showcase1, showcase2):
    key1 = showcase1.class_key(showcase1.vector(fx.SHOWCASE_TWO_NODES_CLASS))
    verify_counting_surgery(showcase1, key1, (0, 2))
    key2 = showcase2.class_key(showcase2.vector(fx.SHOWCASE_STAR_CLASS))
    verify_counting_surgery(showcase2, key2, (1, 2, 3, 4))


def test_counting_surgery_sweep_matches_single(showcase2):
    out = counting_surgery_sweep(showcase2, (1, 3))
    for key in showcase2.classes().reps_scaled[:4]:
        rep = verify_counting_surgery(showcase2, key, (1, 3))
        for i, (full, reduced, comp_sum) in enumerate(out[key]):
            assert full == rep.items[i]["full"]
            assert reduced == rep.items[i]["reduced"]
            assert comp_sum == sum(rep.items[i]["components"])


def test_counting_surgery_random_trees():
    rng = random.Random(99)
    for g in fx.random_trees(seed=77, count=5, n_range=(4, 6)):
        key = g.class_key(g.from_dual_coords([rng.randint(0, 4) for _ in range(g.n)]))
        subset = tuple(sorted(rng.sample(range(g.n), rng.randint(1, g.n))))
        verify_counting_surgery(g, key, subset)


def test_pc_methods_agree_univariate(showcase2):
    for key in showcase2.classes().reps_scaled:
        for v in range(showcase2.n):
            assert (pc_reduced(showcase2, key, (v,), "closed_form")
                    == pc_reduced(showcase2, key, (v,), "univariate_fit"))


def test_pc_gorenstein_matches_closed_form(gor_star):
    zero = tuple([0] * gor_star.n)
    for subset in [(0,), (1, 2), (0, 3, 4), tuple(range(gor_star.n))]:
        assert (pc_reduced(gor_star, zero, subset, "gorenstein")
                == pc_reduced(gor_star, zero, subset, "closed_form"))


def test_pc_method_preconditions(showcase2, gor_star):
    key = showcase2.classes().reps_scaled[3]
    with pytest.raises(MethodPreconditionFailed):
        pc_reduced(showcase2, key, (0, 1), "univariate_fit")
    with pytest.raises(MethodPreconditionFailed):
        pc_reduced(gor_star, gor_star.classes().reps_scaled[1], (0,), "gorenstein")
    with pytest.raises(MethodPreconditionFailed):
        pc_reduced(showcase2, key, (), "closed_form")


def test_reduced_pc_equals_full_pc_over_nodes(showcase1):
    # the reduction to node variables preserves the periodic constant
    table = sw_table(showcase1)
    for key in list(table)[:8]:
        assert (pc_reduced(showcase1, key, showcase1.nodes, "closed_form")
                == pc_reduced(showcase1, key, tuple(range(showcase1.n)), "closed_form"))


def test_string_component_terms_vanish(showcase1):
    # every component of T minus its nodes is a string; each term vanishes
    forest = showcase1.components_minus(showcase1.nodes)
    for key in list(sw_table(showcase1))[:8]:
        r = showcase1.rep_from_key(key)
        for comp, origin in forest:
            assert component_term(comp, dual_restrict(r, comp, origin)) == 0


def test_pc_surgery_univariate(showcase2):
    rep = verify_pc_surgery(showcase2, showcase2.classes().reps_scaled[5], (2,))
    assert rep.equal and rep.method == "univariate_fit"


def test_pc_surgery_gorenstein(gor_star):
    zero = tuple([0] * gor_star.n)
    rep = verify_pc_surgery(gor_star, zero, (1, 2))
    assert rep.equal and rep.method == "gorenstein"


def test_pc_surgery_conditional_path(showcase2):
    key = showcase2.classes().reps_scaled[3]
    rep = verify_pc_surgery(showcase2, key, (1, 2))
    assert rep.equal and rep.method == "prop1_conditional"


def test_reduction_red1_red2_star(showcase2):
    for key in showcase2.classes().reps_scaled:
        reduction_rational(showcase2, key, (1, 2, 3, 4), "red1")
        reduction_rational(showcase2, key, (1, 2, 3, 4), "red2")


def test_reduction_trivial_class_has_zero_corrections(showcase2):
    zero = tuple([0] * showcase2.n)
    rep = reduction_rational(showcase2, zero, (1, 2, 3, 4), "red1")
    for item in rep.items:
        if "chi_correction" in item:
            assert item["chi_correction"] == "0/1"


def test_reduction_rejects_nonrational_component():
    # a pendant vertex whose removal leaves the non-rational five-leg star
    g = fx.validate(
        ["c", "p1", "p2", "p3", "p4", "p5", "t"],
        [-3, -2, -2, -2, -2, -2, -2],
        [("c", "p1"), ("c", "p2"), ("c", "p3"), ("c", "p4"), ("c", "p5"),
         ("p1", "t")],
    )
    with pytest.raises(ComponentNotRational):
        reduction_rational(g, tuple([0] * g.n), (g.index["t"],), "red1")


def test_surgery_report_serialization(showcase2):
    key = showcase2.class_key(showcase2.vector(fx.SHOWCASE_STAR_CLASS))
    rep = verify_counting_surgery(showcase2, key, (1, 2, 3, 4))
    d = rep.as_dict()
    assert d["verdict"] == "equal"
    assert d["kind"] == "counting"
    assert d["lhs"] == d["rhs"]
    rec = sw_invariant(showcase2, key)
    rd = rec.as_dict()
    assert rd["sw"].count("/") == 1


def test_rational_graph_trivial_class_pc_vanishes(showcase2):
    # rational tree, trivial class, rational pieces: both sides of the surgery
    # normalize to zero, so every reduced pc vanishes
    g = showcase2
    zero = tuple([0] * g.n)
    for subset in [(0,), (1,), (1, 2), (0, 3), (1, 2, 3, 4), tuple(range(g.n))]:
        assert pc_reduced(g, zero, subset, "closed_form") == 0
    for eulers in [(-2, -3), (-4, -2, -5)]:
        s = fx.string_graph(eulers)
        zero = tuple([0] * s.n)
        for v in range(s.n):
            assert pc_reduced(s, zero, (v,), "closed_form") == 0


def test_star_chi_correction_values(showcase2):
    # the restricted showcase class has minimal representative E0/3, and the
    # chi correction reproduces the measured component term of -1
    g = showcase2
    rh = g.vector(fx.SHOWCASE_STAR_CLASS)
    forest = g.components_minus((1, 2, 3, 4))
    comp, origin = forest.components[0], forest.origins[0]
    y = dual_restrict(rh, comp, origin)
    s1, _ = minimal_s_rep(comp, class_of(y))
    assert s1.coords == (Fraction(1, 3),)
    assert comp.chi(s1) - comp.chi(y) == -1 == component_term(comp, y)


def test_duality_of_reduced_quasipoly(gor_star):
    # trivial class on an integral-anticanonical graph: values at l and ZK - l agree
    g = gor_star
    zero = tuple([0] * g.n)
    rng = random.Random(8)
    for subset in [(0,), (1, 2), (0, 2, 4)]:
        qp = quasipoly_reduced(g, zero, subset)
        assert qp.evaluate(g.zero()) == qp.evaluate(g.ZK)
        for _ in range(5):
            l = g.vector([rng.randint(-1, 2) for _ in range(g.n)])
            assert qp.evaluate(l) == qp.evaluate(g.ZK - l)
