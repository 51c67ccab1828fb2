"""Parser and jet-evaluation tests."""

import math
import random

import pytest

from conftest import fd_first, fd_second
from ricci_collar import (
    DomainError,
    Jet2,
    NonFiniteResult,
    ParseError,
    eval_jet2,
    parse_expr,
    serialize,
)
from ricci_collar.expr import BinOp, Call, Const, Neg, Num, Var


class TestParse:
    def test_basic_tree(self):
        expr = parse_expr("2+3*r")
        assert expr.root == BinOp("+", Num(2.0), BinOp("*", Num(3.0), Var()))

    def test_function_call(self):
        expr = parse_expr("exp(2*r)")
        assert expr.root == Call("exp", BinOp("*", Num(2.0), Var()))

    def test_malformed_offset(self):
        with pytest.raises(ParseError) as info:
            parse_expr("2+*r")
        assert info.value.offset == 2

    def test_unknown_identifier(self):
        with pytest.raises(ParseError) as info:
            parse_expr("2 + bogus")
        assert info.value.offset == 4

    def test_missing_paren(self):
        with pytest.raises(ParseError):
            parse_expr("sin(r")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError) as info:
            parse_expr("2 3")
        assert info.value.offset == 2

    def test_power_is_right_associative(self):
        expr = parse_expr("2^3^2")
        assert expr.root == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))

    def test_unary_minus_binds_below_power(self):
        assert parse_expr("-r^2").root == Neg(BinOp("^", Var(), Num(2.0)))

    def test_constants(self):
        assert parse_expr("pi").root == Const("pi")
        assert eval_jet2(parse_expr("pi"), 0.0).v0 == math.pi
        assert eval_jet2(parse_expr("e"), 0.0).v0 == math.e


class TestSerializeRoundTrip:
    CASES = [
        "2 + 3*r",
        "exp(2*r)",
        "-(r + 1)*sin(pi*r)",
        "r^-2 + 1/(1 + r^2)",
        "2^3^2",
        "sqrt(abs(r - 0.5))",
        "1 - (2 - r)",
        "r/(2*r)/3",
        "-r^2",
        "tanh(r)*log(1 + r) - cosh(r)/sinh(1 + r)",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_fixed_cases(self, text):
        tree = parse_expr(text)
        assert parse_expr(serialize(tree)) == tree

    def test_random_trees(self):
        """Serialization re-parses to a structurally identical tree."""
        rng = random.Random(1234)
        funcs = sorted(["sin", "cos", "tan", "sinh", "cosh", "tanh", "exp", "log", "sqrt", "abs"])

        def build(depth):
            roll = rng.random()
            if depth <= 0 or roll < 0.25:
                leaf = rng.random()
                if leaf < 0.4:
                    return Num(round(rng.uniform(0.0, 10.0), 3))
                if leaf < 0.8:
                    return Var()
                return Const(rng.choice(["pi", "e"]))
            if roll < 0.35:
                return Neg(build(depth - 1))
            if roll < 0.55:
                return Call(rng.choice(funcs), build(depth - 1))
            op = rng.choice(["+", "-", "*", "/", "^"])
            return BinOp(op, build(depth - 1), build(depth - 1))

        from ricci_collar import RadialExpr

        for _ in range(300):
            tree = build(depth=5)
            text = serialize(RadialExpr(tree))
            assert parse_expr(text).root == tree, text


class TestJets:
    def test_identity(self):
        assert eval_jet2(parse_expr("r"), 0.3) == Jet2(0.3, 1.0, 0.0)

    def test_quadratic(self):
        """Hand differentiation: 2 + r^2 at 1 has value 3, slope 2, curvature 2."""
        assert eval_jet2(parse_expr("2+r^2"), 1.0) == Jet2(3.0, 2.0, 2.0)

    def test_exponential(self):
        """Hand differentiation: exp(2r) at 0 gives (1, 2, 4)."""
        assert eval_jet2(parse_expr("exp(2*r)"), 0.0) == Jet2(1.0, 2.0, 4.0)

    def test_sine(self):
        """Hand differentiation: sin(pi r) at 1/2 gives (1, 0, -pi^2)."""
        jet = eval_jet2(parse_expr("sin(pi*r)"), 0.5)
        assert jet.v0 == pytest.approx(1.0, abs=1e-15)
        assert jet.v1 == pytest.approx(0.0, abs=1e-15)
        assert jet.v2 == pytest.approx(-math.pi**2, rel=1e-14)

    # Safe sampling windows for each primitive.
    ZOO = [
        ("sin(r)", (-1.3, 1.3)),
        ("cos(r)", (-1.3, 1.3)),
        ("tan(r)", (-1.2, 1.2)),
        ("sinh(r)", (-1.5, 1.5)),
        ("cosh(r)", (-1.5, 1.5)),
        ("tanh(r)", (-1.5, 1.5)),
        ("exp(r)", (-1.5, 1.5)),
        ("log(r)", (0.3, 2.0)),
        ("sqrt(r)", (0.3, 2.0)),
        ("abs(r)", (0.2, 2.0)),
        ("exp(sin(2*r))/(1 + r^2)", (-1.0, 1.0)),
        ("r^2.5", (0.3, 2.0)),
        ("(1 + r)^r", (0.1, 1.5)),
        ("tanh(r)*log(1 + r)", (0.1, 1.5)),
    ]

    @pytest.mark.parametrize("text,window", ZOO)
    def test_against_finite_differences(self, text, window):
        """First/second derivatives agree with central differences."""
        expr = parse_expr(text)
        rng = random.Random(hash(text) & 0xFFFF)
        value = lambda r: eval_jet2(expr, r).v0
        for _ in range(25):
            r = rng.uniform(*window)
            jet = eval_jet2(expr, r)
            assert abs(jet.v1 - fd_first(value, r)) <= 1e-6 * (1.0 + abs(jet.v1))
            assert abs(jet.v2 - fd_second(value, r)) <= 1e-4 * (1.0 + abs(jet.v2))

    def test_composition_is_jet_arithmetic(self):
        """Evaluating a product tree equals multiplying the factor jets bitwise."""
        left = parse_expr("sin(r) + 2")
        right = parse_expr("exp(0.5*r)")
        whole = parse_expr("(sin(r) + 2)*exp(0.5*r)")
        for r in (0.1, 0.7, 1.3):
            assert eval_jet2(whole, r) == eval_jet2(left, r) * eval_jet2(right, r)

    def test_integer_power_of_negative_base(self):
        assert eval_jet2(parse_expr("(0 - 2)^3"), 0.5).v0 == -8.0

    def test_domain_errors(self):
        for text, r in [
            ("log(r)", 0.0),
            ("log(r - 1)", 0.5),
            ("sqrt(r - 1)", 0.5),
            ("abs(r)", 0.0),
            ("1/(r - r)", 0.3),
            ("(0 - 2)^r", 0.5),
            ("(0 - 2)^0.5", 0.9),
        ]:
            with pytest.raises(DomainError):
                eval_jet2(parse_expr(text), r)

    def test_overflow_is_nonfinite(self):
        with pytest.raises(NonFiniteResult):
            eval_jet2(parse_expr("exp(exp(r))"), 100.0)
