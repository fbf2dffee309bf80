import random
import unittest
from fractions import Fraction

import sympy

from pscale.cpoly import HoloMap, Multidegree
from pscale.cscalar import ComplexScalar
from pscale.domain import DomainSpec
from pscale.errors import BoundaryError, NotInteriorError
from pscale.normalize import classify_monomial, lift_to_boundary, normal_form_defect, normalize_at
from pscale.scaling import boundary_grid

PERTURBED_EGG = "abs2(z1)^2 + abs2(z2) + 1/10*Re(z1*zb1^2*z2)"


def egg_table_oracle(a):
    """Coefficients of u^j ub^k in |a + u|^4 - |a|^4 (a real), by symbolic expansion."""
    u, ub = sympy.symbols("u ub")
    expr = sympy.expand((a + u) ** 2 * (a + ub) ** 2 - a**4)
    poly = sympy.Poly(expr, u, ub)
    return {(j, k): Fraction(str(c)) for (j, k), c in poly.terms()}


class LiftTests(unittest.TestCase):
    def setUp(self):
        random.seed(100)
        self.maxDiff = None

    def test_normal_point(self):
        eta_prime, eps = lift_to_boundary(DomainSpec.egg(2), [0, 0, Fraction(-1, 4)])
        self.assertEqual(Fraction(1, 4), eps)
        self.assertEqual((0, 0, 0), eta_prime)

    def test_off_axis_point(self):
        eta_prime, eps = lift_to_boundary(DomainSpec.egg(2), [Fraction(1, 2), 0, -1])
        self.assertEqual(Fraction(15, 16), eps)
        self.assertEqual((ComplexScalar(Fraction(1, 2)), 0, ComplexScalar(Fraction(-1, 16))), eta_prime)

    def test_boundary_point_is_rejected(self):
        with self.assertRaises(NotInteriorError):
            lift_to_boundary(DomainSpec.egg(2), [0, 0, 0])
        with self.assertRaises(BoundaryError):
            lift_to_boundary(DomainSpec.egg(2), [0, -1])


class NormalizeTests(unittest.TestCase):
    def setUp(self):
        random.seed(100)
        self.maxDiff = None

    def test_egg_at_origin(self):
        spec = DomainSpec.egg(2)
        norm = normalize_at(spec, [0, 0, 0])
        self.assertEqual((), norm.steps)
        self.assertEqual(HoloMap.identity(3), norm.phi)
        self.assertEqual(2, norm.m)
        self.assertEqual({(2, 2): 1}, {k: v for k, v in norm.a_table.items() if v != 0})
        self.assertTrue(all(v == 0 for v in norm.b_table.values()))
        self.assertTrue(norm.remainder.is_zero)
        self.assertTrue(norm.exact)

    def test_egg_binomial_table(self):
        spec = DomainSpec.egg(2)
        j = 5
        a = Fraction(1, j)
        norm = normalize_at(spec, [a, 0, -(a**4)])
        expected = {
            (1, 1): Fraction(4, j**2),
            (2, 1): Fraction(2, j),
            (1, 2): Fraction(2, j),
            (2, 2): Fraction(1),
        }
        oracle = egg_table_oracle(sympy.Rational(1, j))
        for key, value in expected.items():
            self.assertEqual(value, oracle[key])
        self.assertEqual(expected, {k: v for k, v in norm.a_table.items() if v != 0})
        self.assertTrue(all(v == 0 for v in norm.b_table.values()))
        self.assertEqual([], norm.violations())
        self.assertTrue(norm.exact)

    def test_ball_model(self):
        spec = DomainSpec.ball_model()
        point = [Fraction(1, 5), ComplexScalar(0, Fraction(1, 10)), ComplexScalar(Fraction(-1, 20), Fraction(1, 3))]
        self.assertEqual(0, spec.defining_value_exact(point))
        norm = normalize_at(spec, point)
        self.assertEqual(1, norm.m)
        self.assertEqual({(1, 1): 1}, {k: v for k, v in norm.a_table.items() if v != 0})
        self.assertEqual([], norm.violations())

    def test_random_rational_points_decompose_exactly(self):
        spec = DomainSpec.egg(2)
        for point in boundary_grid(spec, 21, radius=Fraction(3, 10))[1:]:
            norm = normalize_at(spec, point)
            self.assertTrue(norm.exact, point)
            rebuilt = spec.rho.substitute(norm.phi_inv) - spec.defining_value_exact(point)
            self.assertEqual(rebuilt, norm.transformed)
            self.assertEqual(norm.transformed, norm.main + norm.remainder)
            self.assertEqual([], norm.violations())
            self.assertEqual(HoloMap.identity(3), norm.phi.compose(norm.phi_inv))
            self.assertEqual(HoloMap.identity(3), norm.phi_inv.compose(norm.phi))

    def test_perturbed_egg_b_table(self):
        spec = DomainSpec.from_text(PERTURBED_EGG, 3)
        a = Fraction(1, 10)
        point = [a, 0, -spec.F.evaluate_exact([a, 0]).re]
        norm = normalize_at(spec, point)
        self.assertNotEqual(0, norm.b_table[2, 1, 1])
        self.assertEqual([], norm.violations())
        self.assertTrue(norm.exact)

    def test_base_point_maps_to_origin(self):
        spec = DomainSpec.from_text(PERTURBED_EGG, 3)
        point = boundary_grid(spec, 2)[1]
        norm = normalize_at(spec, point)
        self.assertEqual((0, 0, 0), norm.phi(point))

    def test_binary64_point(self):
        spec = DomainSpec.egg(2)
        norm = normalize_at(spec, [0.2, 0.0, -(0.2**4)])
        self.assertFalse(norm.exact)
        self.assertLess(normal_form_defect(norm), 1e-12)
        self.assertAlmostEqual(0.16, abs(norm.a_table[1, 1]))

    def test_off_boundary_rejected(self):
        spec = DomainSpec.egg(2)
        with self.assertRaises(BoundaryError):
            normalize_at(spec, [0, 0, Fraction(-1, 2)])
        with self.assertRaises(BoundaryError):
            normalize_at(spec, [3, 0, -81])

    def test_to_json(self):
        norm = normalize_at(DomainSpec.egg(2), [Fraction(1, 5), 0, Fraction(-1, 625)])
        data = norm.to_json()
        self.assertEqual(2, data["m"])
        self.assertTrue(data["exact"])
        self.assertIn({"j": 1, "k": 1, "re": 0.16, "im": 0.0}, data["a"])
        self.assertEqual(3, len(data["phi"]))


class ClassifyMonomialTests(unittest.TestCase):
    def test_classes(self):
        n, m = 3, 2
        self.assertEqual("constant", classify_monomial(Multidegree.zero(3), n, m))
        self.assertEqual("w_n term", classify_monomial(Multidegree.of(3, {3: 1}, {1: 1}), n, m))
        self.assertEqual("harmonic", classify_monomial(Multidegree.of(3, {1: 2, 2: 1}), n, m))
        self.assertIsNone(classify_monomial(Multidegree.of(3, {1: 5}), n, m))
        self.assertEqual("pure w1 mixed", classify_monomial(Multidegree.of(3, {1: 1}, {1: 2}), n, m))
        self.assertEqual("Levi block", classify_monomial(Multidegree.of(3, {2: 1}, {2: 1}), n, m))
        self.assertEqual("w_alpha mixed", classify_monomial(Multidegree.of(3, {1: 1, 2: 1}, {1: 1}), n, m))
        self.assertEqual("w_alpha cross", classify_monomial(Multidegree.of(3, {1: 2}, {2: 1}), n, m))
        self.assertIsNone(classify_monomial(Multidegree.of(3, {1: 2, 2: 1}, {1: 1}), n, m))
