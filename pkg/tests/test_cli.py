import contextlib
import io
import json
import os
import tempfile
import unittest

from pscale.cli import EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_OK, main
from pscale.cpoly import parse_poly

EGG = {"n": 3, "F": "abs2(z1)^2 + abs2(z2)", "label": "E2"}
BALL = {"n": 3, "F": "abs2(z1) + abs2(z2)", "label": "ball"}


class CliTests(unittest.TestCase):
    def setUp(self):
        self.maxDiff = None
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write(self, name, payload):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(payload if isinstance(payload, str) else json.dumps(payload))
        return path

    def run_main(self, *argv):
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = main(list(argv))
        self.stderr = err.getvalue()
        text = out.getvalue()
        return code, json.loads(text) if text.strip() else None

    def test_analyze_egg(self):
        code, data = self.run_main("analyze", self.write("egg.json", EGG))
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(4, data["type"])
        self.assertEqual(1, data["corank"])
        self.assertEqual("pass", data["hypotheses"])
        self.assertFalse(data["strongly_pseudoconvex_at_origin"])
        self.assertTrue(all(data["normal_form"].values()))

    def test_analyze_ball(self):
        code, data = self.run_main("analyze", self.write("ball.json", BALL))
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(2, data["type"])
        self.assertEqual(0, data["corank"])
        self.assertTrue(data["strongly_pseudoconvex_at_origin"])

    def test_analyze_hypothesis_failure(self):
        domain = self.write("harmonic.json", {"n": 3, "F": "Re(z1^3) + abs2(z1)^2 + abs2(z2)"})
        code, data = self.run_main("analyze", domain)
        self.assertEqual(EXIT_HYPOTHESIS, code)
        self.assertEqual("fail", data["hypotheses"])
        self.assertFalse(data["normal_form"]["no harmonic pure-z1 terms"])

    def test_input_errors(self):
        self.assertEqual(EXIT_INPUT, self.run_main("analyze", self.write("bad.json", "{not json"))[0])
        self.assertEqual(EXIT_INPUT, self.run_main("analyze", self.write("n1.json", {"n": 1, "F": "abs2(z1)"}))[0])
        self.assertEqual(EXIT_INPUT, self.run_main("analyze", self.write("list.json", [1, 2]))[0])
        self.assertEqual(EXIT_INPUT, self.run_main("analyze", os.path.join(self.tmp.name, "missing.json"))[0])
        self.assertEqual(EXIT_INPUT, self.run_main("analyze", self.write("z1.json", {"n": 3, "F": "abs2(z1) +"}))[0])
        self.assertIn("position", self.stderr)

    def test_argument_errors(self):
        with contextlib.redirect_stderr(io.StringIO()):
            for argv in ([], ["bogus"], ["limit"], ["limit", "a", "b", "--tol", "x"]):
                with self.assertRaises(SystemExit) as ctx:
                    main(argv)
                self.assertEqual(EXIT_INPUT, ctx.exception.code, argv)

    def test_normalize(self):
        domain = self.write("egg.json", EGG)
        code, data = self.run_main("normalize", domain, "--point", "1/5,0;0,0;-1/625,0")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(0.0, data["epsilon"])
        self.assertEqual(2, data["m"])
        self.assertIn({"j": 1, "k": 1, "re": 0.16, "im": 0.0}, data["a"])
        code, data = self.run_main("normalize", domain, "--point", "0,0;0,0;-1/4,0")
        self.assertEqual(0.25, data["epsilon"])
        self.assertEqual(EXIT_INPUT, self.run_main("normalize", domain, "--point", "0,0;-1,0")[0])

    def test_scale(self):
        domain = self.write("egg.json", EGG)
        code, data = self.run_main("scale", domain, "--point", "0,0;0,0;-1/10000,0")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(1e-4, data["epsilon"])
        self.assertEqual(0.1, data["tau"])
        self.assertTrue(data["tau_exact"])
        code, same = self.run_main("scale", domain, "--point", "0,0;0,0;0,0", "--epsilon", "1/10000")
        self.assertEqual(data, same)

    def test_limit(self):
        domain = self.write("egg.json", EGG)
        seq = self.write("seq.json", {"kind": "tangential", "params": {"powers": [1, 4]}, "jmax": 5})
        output = os.path.join(self.tmp.name, "limit.json")
        code, data = self.run_main("limit", domain, seq, "--probe", "-o", output)
        self.assertEqual(EXIT_OK, code)
        self.assertIsNone(data)
        self.assertIn("strongly pseudoconvex: no", self.stderr)
        with open(output, encoding="utf-8") as handle:
            report = json.load(handle)
        self.assertTrue(report["converged"])
        self.assertTrue(report["probe"]["passed"])
        self.assertEqual(5, len(report["traces"]["tau"]))

    def test_limit_output_is_reproducible(self):
        domain = self.write("egg.json", EGG)
        seq = self.write("seq.json", {"kind": "tangential", "params": {"powers": [1, 4]}, "jmax": 6})
        contents = []
        for name in ("first.json", "second.json"):
            output = os.path.join(self.tmp.name, name)
            self.assertEqual((EXIT_OK, None), self.run_main("limit", domain, seq, "-o", output))
            with open(output, "rb") as handle:
                contents.append(handle.read())
        self.assertEqual(contents[0], contents[1])
        report = json.loads(contents[0])
        P = parse_poly(report["P_limit"]["expr"], 1)
        self.assertEqual(parse_poly("abs2(z1) + 1/4*z1^2*zb1 + 1/4*z1*zb1^2 + 1/16*abs2(z1)^2", 1), P)
        terms = {(t["holo"][0], t["anti"][0]): complex(t["re"], t["im"]) for t in report["P_limit"]["terms"]}
        self.assertEqual({(key.holo[0], key.anti[0]): complex(c) for key, c in P}, terms)

    def test_limit_window_and_jmax(self):
        domain = self.write("egg.json", EGG)
        seq = self.write("seq.json", {"kind": "normal"})
        code, data = self.run_main("limit", domain, seq, "--jmax", "4")
        self.assertEqual(EXIT_OK, code)
        self.assertEqual(4, len(data["traces"]["epsilon"]))
        self.assertEqual(EXIT_INPUT, self.run_main("limit", domain, seq, "--jmax", "2")[0])

    def test_limit_non_convergence(self):
        domain = self.write("egg.json", EGG)
        points = [
            ["0", "0", "-1"],
            ["1/2", "0", "-1/8"],
            ["0", "0", "-1/3"],
            ["1/4", "0", "-1/128"],
            ["0", "0", "-1/5"],
            ["1/6", "0", "-1/648"],
        ]
        seq = self.write("explicit.json", {"kind": "explicit", "params": {"points": points}})
        code, data = self.run_main("limit", domain, seq)
        self.assertEqual(EXIT_NONCONVERGENCE, code)
        self.assertFalse(data["converged"])
        self.assertEqual(6, len(data["traces"]["coefficients"]))

    def test_match(self):
        H = self.write("H.json", {"P": "abs2(z1)^2 + Re(z1^3*zb1)"})
        Q = self.write("Q.json", {"P": "3*abs2(z1)^2 + 3*Re(i*z1^3*zb1)"})
        code, data = self.run_main("match", Q, H)
        self.assertEqual(EXIT_OK, code)
        self.assertTrue(data["match"])
        self.assertAlmostEqual(3.0, data["lambda"])
        self.assertAlmostEqual(0.7853981633974483, data["nu"])

        code, data = self.run_main("match", self.write("Q2.json", {"P": "2*abs2(z1)^2"}), self.write("H2.json", {"P": "abs2(z1)^2"}))
        self.assertEqual((EXIT_OK, 2.0, 0.0), (code, data["lambda"], data["nu"]))

        code, data = self.run_main("match", self.write("Q3.json", {"P": "abs2(z1)^2 + Re(z1^3*zb1)"}), self.write("H3.json", {"P": "abs2(z1)^2"}))
        self.assertEqual({"match": False}, data)

        code, data = self.run_main("match", self.write("Q4.json", {"P": "abs2(z1)^2"}), self.write("H4.json", {"P": "abs2(z1)"}))
        self.assertEqual(EXIT_HYPOTHESIS, code)
        self.assertIsNone(data)
