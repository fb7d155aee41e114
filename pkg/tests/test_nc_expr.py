import numpy as np
import pytest

from ncclark import ArityError, DomainError, MatrixTuple, ParseError, eval_expr, parse, to_str
from ncclark.nc_expr import Add, Const, Inv, Mul, Neg, Var, ast_to_obj, obj_to_ast, regular_at_zero
from ncclark.nc_linalg import random_tuple, random_row_contraction, conjugate_tuple

EXPRS = [
    "z2*z1",
    "(1 - z1*z2)*inv(1 - z2*z1)",
    "2.5 + 0.5i - z1",
    "-(z1 + z2)^-1 * z2",
    "inv(2 - x*y - y*x)",
]


def test_parse_shapes():
    assert parse("z2*z1", 2) == Mul(Var(2), Var(1))
    assert parse("z1^-1", 1) == Inv(Var(1))
    assert parse("-z1", 1) == Neg(Var(1))
    e = parse("(1 - x*y)*inv(1 - y*x)", 2)  # x,y aliases at d=2
    assert isinstance(e, Mul) and isinstance(e.right, Inv)


def test_parse_complex_literals():
    e = parse("1.5+2i", 1)
    Z = MatrixTuple((np.zeros((2, 2)),))
    assert np.allclose(eval_expr(e, Z), (1.5 + 2j) * np.eye(2))
    assert parse("2i", 1) == Const(2j)


def test_parse_errors():
    with pytest.raises(ArityError):
        parse("z3", 2)
    with pytest.raises(ParseError) as ei:
        parse("z1 + * z2", 2)
    assert "position" in str(ei.value) or any(ch.isdigit() for ch in str(ei.value))
    with pytest.raises(ParseError):
        parse("(z1", 2)


def test_to_str_roundtrip():
    for text in EXPRS:
        e = parse(text, 2)
        assert parse(to_str(e), 2) == e


def test_json_ast_roundtrip():
    for text in EXPRS:
        e = parse(text, 2)
        assert obj_to_ast(ast_to_obj(e)) == e


def test_eval_matches_manual():
    rng = np.random.default_rng(0)
    Z = random_tuple(2, 3, rng)
    got = eval_expr(parse("z2*z1", 2), Z)
    assert np.allclose(got, Z[1] @ Z[0])
    got = eval_expr(parse("1 - 2*z1", 2), Z)
    assert np.allclose(got, np.eye(3) - 2 * Z[0])


def test_eval_respects_direct_sums():
    rng = np.random.default_rng(1)
    for text in EXPRS:
        e = parse(text, 2)
        Z = random_row_contraction(2, 2, rng, row=0.4)
        W = random_row_contraction(2, 3, rng, row=0.4)
        ZW = MatrixTuple(
            tuple(
                np.block([[z, np.zeros((2, 3))], [np.zeros((3, 2)), w]]) for z, w in zip(Z, W)
            )
        )
        direct = np.block(
            [
                [eval_expr(e, Z), np.zeros((2, 3))],
                [np.zeros((3, 2)), eval_expr(e, W)],
            ]
        )
        assert np.linalg.norm(eval_expr(e, ZW) - direct) <= 1e-10


def test_eval_respects_similarity():
    rng = np.random.default_rng(2)
    for text in EXPRS:
        e = parse(text, 2)
        Z = random_row_contraction(2, 3, rng, row=0.3)
        S = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
        lhs = eval_expr(e, conjugate_tuple(Z, S))
        rhs = S @ eval_expr(e, Z) @ np.linalg.inv(S)
        assert np.linalg.norm(lhs - rhs) <= 1e-9 * max(1.0, np.linalg.norm(rhs))


def test_commutator_vanishes_on_commuting_pair():
    rng = np.random.default_rng(3)
    D1 = np.diag(rng.standard_normal(3) * 0.3)
    D2 = np.diag(rng.standard_normal(3) * 0.3)
    Z = MatrixTuple((D1, D2))
    e = parse("(x*y - y*x)*inv(2 - x*y - y*x)", 2)
    assert np.linalg.norm(eval_expr(e, Z)) <= 1e-12


def test_domain_error_names_subexpression():
    Z = MatrixTuple((np.zeros((2, 2)),))
    with pytest.raises(DomainError) as ei:
        eval_expr(parse("inv(z1)", 1), Z)
    assert "z1" in str(ei.value)


def test_regular_at_zero():
    assert regular_at_zero(parse("inv(1 - z1)", 1))
    assert not regular_at_zero(parse("inv(z1)", 1))
    assert regular_at_zero(parse("z1 + z2", 2))
