import math
import random
from fractions import Fraction

import gmpy2
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from isoperturb import (
    DegenerateGraphError,
    Graph,
    build_graph_matrix,
    condition_bound,
    det_exact,
    perturb,
    precision_plan,
    separation_bound,
    solve_exact,
    solve_gs,
    sweep_budget,
)
from isoperturb.graphs import complete, gnp, path, torus
from isoperturb.numkit import (
    as_fraction,
    cofactor,
    format_matrix,
    format_scalar,
    gs_gamma,
    int_det,
    inverse_exact,
    inverse_exact_int,
    localization_bound,
    rank_one_update,
    spectral_ratio_estimate,
)


def sym(m):
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in m.rows()])


def random_matrix(rng: random.Random, n_range=(2, 8), perturbations=3):
    while True:
        g = gnp(rng.randint(*n_range), rng.uniform(0.2, 0.8), rng.getrandbits(32))
        if g.m:
            break
    m = build_graph_matrix(g)
    for _ in range(rng.randint(0, perturbations)):
        m = perturb(m, rng.randint(1, g.n), Fraction(1, rng.randint(2, 60)))
    return m


@st.composite
def matrices(draw):
    return random_matrix(random.Random(draw(st.integers(0, 2**32))))


def test_example_graph_matrix(example_graphs):
    from worked_example import A_MATRIX, B_MATRIX

    ga, gb = example_graphs
    assert build_graph_matrix(ga).rows() == A_MATRIX
    assert build_graph_matrix(gb).rows() == B_MATRIX


def test_edgeless_graph_is_degenerate():
    with pytest.raises(DegenerateGraphError):
        build_graph_matrix(Graph.from_edges(4, []))


def test_single_edge_matrix():
    m = build_graph_matrix(Graph.from_edges(2, [(1, 2)]))
    assert m.rows() == [[2, 1], [1, 2]]
    assert det_exact(m) == 3


def test_perturb_is_persistent_and_validated():
    m = build_graph_matrix(complete(3))
    p = perturb(m, 2, "1/4")
    assert m.diag(2) == 4 and p.diag(2) == Fraction(17, 4)
    for bad in (0, -1):
        with pytest.raises(ValueError):
            perturb(m, 1, bad)
    with pytest.raises(ValueError):
        perturb(m, 4, Fraction(1, 2))


def test_as_fraction_routes():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("3/7") == Fraction(3, 7)
    assert as_fraction(gmpy2.mpq(2, 9)) == Fraction(2, 9)


def test_det_of_k3_matrix():
    # 3I + J: eigenvalues 6, 3, 3
    m = build_graph_matrix(complete(3))
    assert m.rows() == [[4, 1, 1], [1, 4, 1], [1, 1, 4]]
    assert det_exact(m) == 54


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_det_and_cofactors_match_sympy(m):
    s = sym(m)
    assert det_exact(m) == Fraction(str(s.det()))
    i, j = 1, m.n
    assert cofactor(m, i, j) == Fraction(str(s.cofactor(i - 1, j - 1)))
    assert cofactor(m, j, j) == Fraction(str(s.cofactor(j - 1, j - 1)))


def test_int_det_with_pivoting():
    assert int_det([[0, 1], [1, 0]]) == -1
    assert int_det([[0, 0], [1, 1]]) == 0
    assert int_det([[2, 3, 1], [4, 1, 0], [0, 5, 2]]) == int(sympy.Matrix([[2, 3, 1], [4, 1, 0], [0, 5, 2]]).det())


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_inverse_matches_sympy(m):
    inv = sym(m).inv()
    cols = inverse_exact(m)
    for j in range(m.n):
        for i in range(m.n):
            v = inv[i, j]
            assert cols[j][i] == Fraction(int(v.p), int(v.q))


@settings(max_examples=40, deadline=None)
@given(matrices(), st.integers(1, 8), st.integers(2, 100))
def test_rank_one_update_matches_direct_inverse(m, index, q):
    index = (index - 1) % m.n + 1
    eps = Fraction(1, q)
    cols, den = inverse_exact_int(m)
    assert rank_one_update(cols, den, index, eps) == inverse_exact_int(perturb(m, index, eps))


def test_canonical_denominator_is_reduced():
    cols, den = inverse_exact_int(build_graph_matrix(complete(3)))
    assert den > 0
    assert math.gcd(den, *[v for col in cols for v in col]) == 1


def test_solve_exact_column():
    m = build_graph_matrix(path(3))
    rep = solve_exact(m, 2)
    assert [sum(m.entry(i, k) * rep.column[k - 1] for k in range(1, 4)) for i in range(1, 4)] == [0, 1, 0]
    with pytest.raises(ValueError):
        solve_exact(m, 0)


def test_gauss_seidel_converges_to_exact():
    m = perturb(build_graph_matrix(torus(3, 3)), 4, Fraction(1, 9))
    exact = solve_exact(m, 4).column
    rep = solve_gs(m, 4, sweeps=80, bits=200)
    assert max(abs(Fraction(gmpy2.mpq(x)) - e) for x, e in zip(rep.column, exact)) < Fraction(1, 10**40)
    assert rep.sweeps_used == 80 and rep.residual_bound < 1e-20
    with pytest.raises(ValueError):
        solve_gs(m, 1, sweeps=0)


def test_gs_gamma_at_most_half():
    for g in (complete(6), torus(3, 4), path(5), gnp(9, 0.5, 4)):
        assert gs_gamma(build_graph_matrix(g)) <= Fraction(1, 2)


def test_condition_bound_example(example_graphs):
    ga, _ = example_graphs
    assert condition_bound(build_graph_matrix(ga)) == 3


@settings(max_examples=30, deadline=None)
@given(matrices())
def test_condition_bound_dominates_spectral_ratio(m):
    assert condition_bound(m) <= 4
    assert spectral_ratio_estimate(m) <= float(condition_bound(m)) * 1.01


def test_separation_bound_values():
    assert separation_bound(6, 4, Fraction(1, 10)) == Fraction(1, 1411344)
    assert separation_bound(6, 4, Fraction(3, 10)) == Fraction(1, 478224)
    for bad in (0, 1, 2):
        with pytest.raises(ValueError):
            separation_bound(6, 4, bad)
    with pytest.raises(ValueError):
        separation_bound(1, 4, Fraction(1, 2))


def test_localization_bound():
    assert localization_bound(6, 4, 1) == Fraction(1, 4)
    assert localization_bound(6, 4, 3) == Fraction(1, 144)
    with pytest.raises(ValueError):
        localization_bound(6, 4, 0)


def test_sweep_budget_values():
    budget = sweep_budget(6, 1, 4, math.sqrt(6))
    assert budget == (23, 24)
    assert sweep_budget(6, 2, 4, math.sqrt(6)).sweeps >= budget.sweeps
    with pytest.raises(ValueError):
        sweep_budget(1, 1, 4, 1.0)


def test_precision_plan_values():
    assert precision_plan(6).mantissa_bits == 64
    assert precision_plan(30).mantissa_bits == 100
    plan = precision_plan(6)
    assert plan.compare_tolerance(4, Fraction(1, 10)) == Fraction(1, 2 * 1411344)


def test_formatting():
    assert format_scalar(Fraction(1, 61)) == "0.01639"
    text = format_matrix([[Fraction(1, 2), Fraction(-1, 3)], [0, 1]])
    assert text.splitlines()[0].split() == ["0.5", "-0.3333"]
