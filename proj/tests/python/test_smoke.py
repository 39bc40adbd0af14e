"""Smoke tests for the python bindings at small bands."""

import math

import numpy as np
import pytest

import hopfpdo as hp


@pytest.fixture(scope="module")
def eng():
    p = hp.EngineParams()
    p.twol_max = 6
    p.twolx_max = 2
    p.order = 2
    return hp.Engine(p)


def test_group_and_representation():
    g = hp.from_angles(0.1, 0.2, 0.7)
    m = hp.irrep_matrix(2, g)
    assert m.shape == (3, 3)
    # unitarity
    prod = m @ m.conj().T
    assert abs(prod[0, 0] - 1) < 1e-12 and abs(prod[0, 1]) < 1e-12
    assert hp.casimir_eigenvalue(0) == 0.0
    assert abs(hp.casimir_eigenvalue(1) - 3 * math.pi**2) < 1e-9


def test_casimir_csv_schema():
    text = hp.casimir_csv(2, True)
    lines = text.strip().splitlines()
    assert lines[0] == "ell,dim,casimir,weight_bracket,lambda"
    assert lines[1].startswith("0,1,0,1")


def test_symbol_quantization(eng):
    lap = hp.laplacian_symbol(eng)
    assert lap.invariant()
    u = eng.random_section(0, 4)
    v = hp.op_apply(eng, lap, u)
    # the laplacian acts on each block by its casimir eigenvalue
    for t in range(min(v.twol_max, 4) + 1):
        want = hp.casimir_eigenvalue(t)
        got = v.blocks[t]
        ref = u.blocks[t]
        assert abs(got - want * ref).max() < 1e-9 * (1 + want)


def test_expression_and_compose(eng):
    a = hp.build_operator_symbol(eng, "I + Lap")
    b = hp.heat_symbol(eng, 0.01)
    c = hp.compose(eng, a, b, 2)
    # invariant composition is the pointwise product
    x = hp.GroupElement.identity()
    for t in (0, 1, 2):
        da = a.block(t, x)
        db = b.block(t, x)
        dc = c.block(t, x)
        assert abs(dc - da @ db).max() < 1e-10


def test_parametrix_exact_for_invariant(eng):
    g = hp.GradedSymbol()
    g.top_order = 2.0
    g.terms = [hp.build_operator_symbol(eng, "I + Lap")]
    p = hp.parametrix(eng, g, 2)
    x = hp.GroupElement.identity()
    for t in (0, 3, 6):
        prod = p.terms[0].block(t, x) @ g.terms[0].block(t, x)
        assert abs(prod - np.eye(t + 1)).max() < 1e-10


def test_heat_semigroup(eng):
    u = eng.random_section(1, 4)
    v1 = hp.heat_evolve(eng, hp.heat_evolve(eng, u, 0.01), 0.02)
    v2 = hp.heat_evolve(eng, u, 0.03)
    for t in range(v1.twol_max + 1):
        assert abs(v1.blocks[t] - v2.blocks[t]).max() < 1e-10


def test_domain_errors(eng):
    with pytest.raises(ValueError):
        bad = hp.EngineParams()
        bad.twol_max = -1
        hp.Engine(bad)
    with pytest.raises(ValueError):
        # a multiplier file that cannot be read is rejected at parse level
        hp.build_operator_symbol(eng, "mul:/nonexistent/phi.csv")
