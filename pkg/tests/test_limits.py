import random
import unittest
from fractions import Fraction

from pscale.cpoly import parse_poly
from pscale.cscalar import ComplexScalar
from pscale.domain import DomainSpec
from pscale.errors import HypothesisError, NotInteriorError, ParseError
from pscale.limits import (
    SequenceSpec,
    async_limit_polynomial,
    domain_convergence_probe,
    generate_sequence,
    least_squares_p,
    limit_polynomial,
    model_grid,
    scaling_sequence,
    tail_converged,
)
from pscale.models import in_model_domain
from pscale.normalize import normalize_at
from pscale.scaling import boundary_grid, rescaled_rho

from .async_test import async_test


def p_coefficients(report):
    return {(key.holo[0], key.anti[0]): complex(c) for key, c in report.P_limit}


class SequenceTests(unittest.TestCase):
    def setUp(self):
        random.seed(100)
        self.maxDiff = None

    def test_normal(self):
        point = generate_sequence(DomainSpec.egg(2), SequenceSpec.normal(), 4)
        self.assertEqual((0, 0, ComplexScalar(Fraction(-1, 4))), point)

    def test_tangential(self):
        spec = DomainSpec.egg(2)
        point = generate_sequence(spec, SequenceSpec.tangential(1, 4), 5)
        self.assertEqual((ComplexScalar(Fraction(1, 5)), 0, ComplexScalar(Fraction(-2, 625))), point)
        self.assertEqual(Fraction(-1, 625), spec.defining_value_exact(point))

    def test_cone(self):
        seq = SequenceSpec.cone(["1/2", [0, 1]], aperture=1)
        point = generate_sequence(DomainSpec.egg(2), seq, 2)
        self.assertEqual(
            (ComplexScalar(Fraction(1, 4)), ComplexScalar(0, Fraction(1, 2)), ComplexScalar(Fraction(-193, 256))),
            point,
        )

    def test_cone_unit_direction(self):
        spec = DomainSpec.ball_model()
        seq = SequenceSpec.cone([1, 0], aperture=1, jmax=4)
        self.assertEqual((1, 0, ComplexScalar(-2)), generate_sequence(spec, seq, 1))
        for j in range(1, 5):
            point = generate_sequence(spec, seq, j)
            self.assertEqual(Fraction(-1, j), spec.defining_value_exact(point))

    def test_explicit(self):
        seq = SequenceSpec.explicit([["0,0", "0,0", "-1/3,0"], [0, 0, "-0.5"]])
        self.assertEqual(2, seq.jmax)
        spec = DomainSpec.egg(2)
        self.assertEqual((0, 0, ComplexScalar(Fraction(-1, 3))), generate_sequence(spec, seq, 1))
        self.assertEqual((0, 0, ComplexScalar(Fraction(-1, 2))), generate_sequence(spec, seq, 2))
        with self.assertRaises(ValueError):
            generate_sequence(spec, seq, 3)

    def test_not_interior(self):
        seq = SequenceSpec.explicit([[0, 0, 0]])
        with self.assertRaises(NotInteriorError):
            generate_sequence(DomainSpec.egg(2), seq, 1)

    def test_from_json(self):
        seq = SequenceSpec.from_json({"kind": "tangential", "params": {"powers": [1, 4]}, "jmax": 10})
        self.assertEqual(SequenceSpec.tangential(1, 4, jmax=10), seq)
        self.assertEqual(5, SequenceSpec.from_json(seq.to_json(), jmax=5).jmax)
        self.assertEqual(SequenceSpec.tangential(1, 4, jmax=5), seq.with_jmax(5))
        with self.assertRaises(ParseError):
            SequenceSpec.from_json({"kind": "explicit", "params": {"points": [[0, 0, -1]]}}, jmax=2)
        explicit = SequenceSpec.from_json({"kind": "explicit", "params": {"points": [[0, 0, -1]]}})
        self.assertEqual(1, explicit.jmax)
        with self.assertRaises(ParseError):
            SequenceSpec.from_json({"kind": "spiral"})
        with self.assertRaises(ParseError):
            SequenceSpec.from_json({"kind": "normal", "jmax": 0})
        with self.assertRaises(ParseError):
            SequenceSpec.from_json(["normal"])
        with self.assertRaises(ParseError):
            generate_sequence(DomainSpec.egg(2), SequenceSpec("tangential", {"powers": [1]}), 1)


class LimitTests(unittest.TestCase):
    def setUp(self):
        random.seed(100)
        self.maxDiff = None

    def test_egg_normal_sequence(self):
        for m in (1, 2, 3):
            report = limit_polynomial(DomainSpec.egg(m), SequenceSpec.normal(jmax=8))
            self.assertTrue(report.converged, m)
            coeffs = p_coefficients(report)
            self.assertEqual([(m, m)], list(coeffs))
            self.assertAlmostEqual(1.0, coeffs[m, m].real, places=12)
            self.assertEqual(m == 1, report.strongly_pseudoconvex)
            self.assertEqual(8, len(report.coeff_trace))
            self.assertEqual(8, len(report.tau_trace))

    def test_egg_tangential_sequence(self):
        report = limit_polynomial(DomainSpec.egg(2), SequenceSpec.tangential(1, 4, jmax=8))
        self.assertTrue(report.converged)
        expected = {(1, 1): 1, (2, 1): 0.25, (1, 2): 0.25, (2, 2): 0.0625}
        self.assertEqual(expected, p_coefficients(report))
        self.assertTrue(report.model.is_subharmonic)
        self.assertFalse(report.model.is_homogeneous)
        self.assertFalse(report.strongly_pseudoconvex)
        for j, tau in enumerate(report.tau_trace, start=1):
            self.assertAlmostEqual(1 / (2 * j), tau)

    def test_ball(self):
        for seq in (
            SequenceSpec.normal(jmax=5),
            SequenceSpec.tangential(1, 4, jmax=5),
            SequenceSpec.cone([1, 0], jmax=5),
        ):
            report = limit_polynomial(DomainSpec.ball_model(), seq)
            self.assertTrue(report.converged)
            coeffs = p_coefficients(report)
            self.assertEqual([(1, 1)], list(coeffs))
            self.assertAlmostEqual(1.0, coeffs[1, 1].real, places=9)
            self.assertTrue(report.strongly_pseudoconvex)
            self.assertIn("strongly pseudoconvex: yes", report.summary(3))

    def test_summary(self):
        report = limit_polynomial(DomainSpec.egg(2), SequenceSpec.normal(jmax=4))
        summary = report.summary(3)
        self.assertTrue(summary.startswith("limit model: Re w_3 + ("))
        self.assertIn("sum|w_a|^2", summary)
        self.assertIn("strongly pseudoconvex: no", summary)

    def test_alternating_sequence_does_not_converge(self):
        points = []
        for j in range(1, 7):
            a = Fraction(1, j)
            points.append([0, 0, -a] if j % 2 else [a, 0, -2 * a**4])
        with self.assertLogs("pscale", level="WARNING"):
            report = limit_polynomial(DomainSpec.egg(2), SequenceSpec.explicit(points))
        self.assertFalse(report.converged)

    def test_window_and_hypotheses(self):
        with self.assertRaises(ValueError):
            limit_polynomial(DomainSpec.egg(2), SequenceSpec.normal(jmax=2), window=3)
        with self.assertRaises(HypothesisError):
            limit_polynomial(DomainSpec.from_text("Re(z1^3) + abs2(z2)", 3), SequenceSpec.normal(jmax=4))

    def test_base_point_images(self):
        report = limit_polynomial(DomainSpec.egg(2), SequenceSpec.tangential(1, 4, jmax=6))
        for image in report.base_point_images:
            self.assertAlmostEqual(0, abs(image[0]))
            self.assertAlmostEqual(-1, image[-1].real)

    @async_test
    async def test_async_entry_point(self):
        report = await async_limit_polynomial(DomainSpec.egg(2), SequenceSpec.normal(jmax=4))
        self.assertTrue(report.converged)

    def test_limit_inside_running_loop(self):
        @async_test
        async def run():
            return limit_polynomial(DomainSpec.egg(2), SequenceSpec.normal(jmax=4))

        report = run()
        self.assertTrue(report.converged)


class TailConvergedTests(unittest.TestCase):
    def test_cases(self):
        same = [{(1, 1): 1.0}] * 3
        self.assertTrue(tail_converged(same, [0.0] * 3, 1e-9, 3))
        self.assertFalse(tail_converged(same[:2], [0.0] * 2, 1e-9, 3))
        self.assertFalse(tail_converged(same, [0.0, 0.0, 1e-3], 1e-9, 3))
        drifting = [{(1, 1): 1.0}, {(1, 1): 1.0}, {(1, 1): 1.0, (2, 2): 1e-6}]
        self.assertFalse(tail_converged(drifting, [0.0] * 3, 1e-9, 3))
        self.assertTrue(tail_converged([{(1, 1): 5.0}] + same, [1.0] + [0.0] * 3, 1e-9, 3))


class DomainConvergenceTests(unittest.TestCase):
    def setUp(self):
        random.seed(100)

    def test_grid_sides(self):
        P = parse_poly("abs2(z1)^2", 1)
        for point, interior in model_grid(P, 3, count=40):
            self.assertEqual(interior, in_model_domain(P, point))

    def test_egg_normal_sequence(self):
        spec = DomainSpec.egg(2)
        report = domain_convergence_probe(spec, SequenceSpec.normal(jmax=6), parse_poly("abs2(z1)^2", 1))
        self.assertTrue(report.passed)
        self.assertEqual((), report.failures)
        self.assertTrue(all(p.j0 == 1 for p in report.points))

    def test_wrong_candidate_fails(self):
        spec = DomainSpec.egg(2)
        report = domain_convergence_probe(spec, SequenceSpec.normal(jmax=6), parse_poly("abs2(z1)", 1))
        self.assertFalse(report.passed)
        self.assertTrue(all(not p.interior for p in report.failures))

    def test_tangential_sequence(self):
        spec = DomainSpec.egg(2)
        P = parse_poly("abs2(z1) + 1/4*z1^2*zb1 + 1/4*z1*zb1^2 + 1/16*abs2(z1)^2", 1)
        report = domain_convergence_probe(spec, SequenceSpec.tangential(1, 4, jmax=6), P)
        self.assertTrue(report.passed)


class LeastSquaresTests(unittest.TestCase):
    def test_agrees_with_extracted_p(self):
        spec = DomainSpec.egg(2)
        rng = random.Random(100)
        points = boundary_grid(spec, 11, radius=Fraction(3, 10))[1:]
        for point in points:
            eps = Fraction(1, 10 ** rng.randint(2, 8))
            sd = rescaled_rho(spec, normalize_at(spec, point), eps)
            fitted = least_squares_p(sd, 2)
            exact = {(key.holo[0], key.anti[0]): complex(c) for key, c in sd.P}
            for key in set(fitted) | set(exact):
                self.assertLessEqual(abs(fitted.get(key, 0) - exact.get(key, 0)), 1e-6, (point, eps, key))

    def test_stages_carry_scaling_data(self):
        stages = scaling_sequence(DomainSpec.egg(2), SequenceSpec.normal(jmax=3))
        self.assertEqual([1, 2, 3], [s.j for s in stages])
        self.assertEqual([1, Fraction(1, 2), Fraction(1, 3)], [s.epsilon for s in stages])
