import unittest
from fractions import Fraction

from pscale.builder import PolyBuilderVisitor, build_poly
from pscale.cscalar import ComplexScalar
from pscale.errors import ParseError, VariableIndexError
from pscale.expr import Abs2, Add, ExprOp, Mul, Neg, Number, Pow, Var, parse, parse_number, parse_point, tokenize


class ParserTests(unittest.TestCase):
    def setUp(self):
        self.maxDiff = None

    def test_tree_shape(self):
        tree = parse("abs2(z1)^2 + 3*zb2", 2)
        self.assertIsInstance(tree, Add)
        self.assertIsInstance(tree.left, Pow)
        self.assertIsInstance(tree.left.base, Abs2)
        self.assertEqual(2, tree.left.exponent)
        self.assertIsInstance(tree.right, Mul)
        self.assertEqual(Var(2, True, 15), tree.right.right)
        self.assertEqual(ExprOp.ADD, tree.OP)

    def test_leading_minus(self):
        tree = parse("-z1", 1)
        self.assertIsInstance(tree, Neg)
        self.assertEqual(ExprOp.NEG, tree.OP)

    def test_numbers_are_exact(self):
        self.assertEqual(Fraction(1, 10), parse_number("0.1"))
        self.assertEqual(Fraction(3, 7), parse_number("3/7"))
        self.assertEqual(Fraction(1, 100000), parse_number("1e-5"))
        tree = parse("2.5", 1)
        self.assertEqual(Number(Fraction(5, 2), 0), tree)
        with self.assertRaises(ParseError):
            parse_number("1/0")

    def test_error_positions(self):
        cases = [
            ("z1 + ", 5),
            ("z1 $ z2", 3),
            ("abs2(z1", 7),
            ("z1^-2", 3),
            ("foo(z1)", 0),
            ("z1 z2", 3),
        ]
        for text, position in cases:
            with self.subTest(text=text):
                with self.assertRaises(ParseError) as ctx:
                    parse(text, 2)
                self.assertEqual(position, ctx.exception.position)
                self.assertIn(f"position {position}", str(ctx.exception))

    def test_variable_out_of_range(self):
        with self.assertRaises(VariableIndexError) as ctx:
            parse("z1 + z4", 3)
        self.assertEqual(5, ctx.exception.position)

    def test_empty(self):
        with self.assertRaises(ParseError):
            parse("   ", 1)

    def test_tokenize(self):
        kinds = [t.kind for t in tokenize("Re(z1)*2/3")]
        self.assertEqual(["name", "op", "name", "op", "op", "number", "end"], kinds)

    def test_parse_point(self):
        self.assertEqual(
            (ComplexScalar(Fraction(1, 5), 0), ComplexScalar(0, Fraction(-1, 2)), ComplexScalar(-1)),
            parse_point("1/5,0; 0,-0.5; -1,0"),
        )
        with self.assertRaises(ParseError):
            parse_point("1,2,3")
        with self.assertRaises(ParseError):
            parse_point("a,0")


class BuilderTests(unittest.TestCase):
    def test_visitor_dispatch(self):
        p = PolyBuilderVisitor(1).visit(parse("conj(i*z1)", 1))
        self.assertEqual(ComplexScalar(0, -1), p.coeff(anti={1: 1}))

    def test_re_im(self):
        re = build_poly(parse("Re(z1^2)", 1), 1)
        im = build_poly(parse("Im(z1^2)", 1), 1)
        self.assertEqual(Fraction(1, 2), re.coeff({1: 2}))
        self.assertEqual(ComplexScalar(0, Fraction(-1, 2)), im.coeff({1: 2}))
        self.assertEqual(ComplexScalar(0, Fraction(1, 2)), im.coeff(anti={1: 2}))
