"""JSON shaping of pipeline results.

``materialize`` walks dataclasses, mappings and sequences down to JSON
primitives. The ``*_report`` functions pick the fields each command emits.
"""
import dataclasses
import json
import math
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Optional

import numpy as np
import polars as pl

from .cpoly import Poly
from .cscalar import ComplexScalar
from .domain import DomainSpec, NormalFormReport, PseudoconvexityReport, TypeCertificate
from .limits import LimitReport, ProbeReport
from .models import ModelClass, ModelMatch, siegel_rescaling, siegel_to_ball
from .normalize import NormalizationResult
from .scaling import QEstimateReport, ScalingData, coefficient_bound

primitive = (int, str, bool)


def _number(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def poly_json(p: Poly) -> Dict[str, Any]:
    terms = []
    for key, c in p:
        c = complex(c)
        terms.append({"holo": list(key.holo), "anti": list(key.anti), "re": c.real, "im": c.imag})
    return {"expr": p.to_expression(), "terms": terms}


def materialize(d) -> Any:
    if isinstance(d, bool) or d is None or isinstance(d, primitive):
        return d
    elif isinstance(d, float):
        return _number(d)
    elif isinstance(d, Fraction):
        return float(d)
    elif isinstance(d, (ComplexScalar, complex)):
        c = complex(d)
        return {"re": c.real, "im": c.imag}
    elif isinstance(d, Poly):
        return poly_json(d)
    elif isinstance(d, Enum):
        return materialize(d.value)
    elif isinstance(d, np.generic):
        return materialize(d.item())
    elif isinstance(d, np.ndarray):
        return [materialize(v) for v in d.tolist()]
    elif isinstance(d, pl.DataFrame):
        return [materialize(row) for row in d.to_dicts()]
    elif dataclasses.is_dataclass(d) and not isinstance(d, type):
        return {f.name: materialize(getattr(d, f.name)) for f in dataclasses.fields(d) if f.repr}
    elif isinstance(d, dict):
        return {_key(k): materialize(v) for k, v in d.items()}
    elif isinstance(d, (list, tuple, set, frozenset)):
        return [materialize(v) for v in d]
    raise TypeError("Invalid type: " + str(type(d)))


def dumps(obj) -> str:
    return json.dumps(materialize(obj), indent=2, ensure_ascii=False)


def analyze_report(
    spec: DomainSpec,
    normal_form: NormalFormReport,
    rank: int,
    corank: int,
    strongly: bool,
    pseudoconvexity: PseudoconvexityReport,
    certificate: Optional[TypeCertificate],
    hypotheses: bool,
) -> Dict[str, Any]:
    return {
        "domain": spec.to_json(),
        "type": certificate.value if certificate else None,
        "type_certified": certificate.certified if certificate else False,
        "type_notes": list(certificate.notes) if certificate else [],
        "rank": rank,
        "corank": corank,
        "strongly_pseudoconvex_at_origin": strongly,
        "normal_form": {c.name: c.passed for c in normal_form.checks},
        "pseudoconvexity": {
            "verdict": pseudoconvexity.verdict,
            "min_eigenvalue": pseudoconvexity.min_eigenvalue,
            "argmin": materialize(pseudoconvexity.argmin),
            "samples": pseudoconvexity.samples,
            "radius": pseudoconvexity.radius,
        },
        "hypotheses": "pass" if hypotheses else "fail",
    }


def normalize_report(epsilon, norm: NormalizationResult) -> Dict[str, Any]:
    return {"epsilon": materialize(epsilon), **norm.to_json()}


def scaling_report(sd: ScalingData, q: QEstimateReport) -> Dict[str, Any]:
    info = sd.tau_info
    return {
        "epsilon": materialize(sd.epsilon),
        "tau": materialize(sd.tau),
        "tau_exact": sd.tau_info is not None and sd.tau_info.exact is not None,
        "scales": materialize(sd.scales),
        "P": poly_json(sd.P),
        "Q": {str(a): poly_json(q_poly) for a, q_poly in sd.Q.items()},
        "diagnostics": {
            "active": [f"{kind}{index}" for kind, index in info.active] if info else [],
            "coefficient_bound": coefficient_bound(sd),
            "q_estimate": materialize(q),
            "exact": sd.exact,
        },
    }


def model_json(model: Optional[ModelClass]) -> Optional[Dict[str, Any]]:
    return materialize(model) if model is not None else None


def ball_map_json(report: LimitReport, n: int) -> Dict[str, Any]:
    "w -> Cayley(sqrt(c) w1, w2, ..., w_n) takes M_{c|z1|^2} onto the unit ball"
    c = report.model.c
    to_siegel = siegel_rescaling(1 / c, n)
    out = {"c": c, "to_siegel": list(to_siegel.to_expressions())}
    if report.base_point_images:
        out["base_point"] = materialize(siegel_to_ball(to_siegel.evaluate(report.base_point_images[-1])))
    return out


def limit_report(report: LimitReport, n: int, probe: Optional[ProbeReport] = None) -> Dict[str, Any]:
    out = {
        "P_limit": poly_json(report.P_limit),
        "converged": report.converged,
        "strongly_pseudoconvex": report.strongly_pseudoconvex,
        "model": model_json(report.model),
        "summary": report.summary(n),
        "tol": report.tol,
        "window": report.window,
        "traces": {
            "coefficients": [
                [{"j": j, "k": k, "re": c.real, "im": c.imag} for (j, k), c in sorted(step.items())]
                for step in report.coeff_trace
            ],
            "q_decay": materialize(report.q_decay),
            "q_verdicts": list(report.q_verdicts),
            "tau": materialize(report.tau_trace),
            "epsilon": materialize(report.eps_trace),
            "bound": materialize(report.bound_trace),
            "base_point_images": materialize(report.base_point_images),
        },
    }
    if report.strongly_pseudoconvex:
        out["ball_map"] = ball_map_json(report, n)
    if probe is not None:
        out["probe"] = {
            "passed": probe.passed,
            "points": len(probe.points),
            "failures": materialize(probe.failures),
        }
    return out


def match_report(result: Optional[ModelMatch]) -> Dict[str, Any]:
    if result is None:
        return {"match": False}
    return {
        "match": True,
        "lambda": result.lam,
        "nu": result.nu,
        "phase_free": result.phase_free,
        "residual": result.residual,
    }

