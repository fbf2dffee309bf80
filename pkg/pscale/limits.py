"""Interior sequences, the scaling pipeline along them, and the limit model."""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .async_utils import ordered_map, wait_for
from .config import (
    BATCH_SIZE,
    JMAX,
    LIMIT_TOL,
    PROBE_MARGIN,
    PROBE_POINTS,
    Q_EXPONENT,
    Q_SAMPLES,
    SEED,
    SUBHARMONIC_SAMPLES,
    WINDOW,
)
from .cpoly import Poly, RealPoly
from .cscalar import ComplexScalar
from .domain import DomainSpec, dangelo_type_z1, validate_normal_form
from .errors import HypothesisError, NotInteriorError, ParseError
from .expr import parse_number, parse_point
from .models import ModelClass, classify_model
from .normalize import NormalizationResult, lift_to_boundary, normalize_at, scaled_base_point
from .scaling import ScalingData, check_q_estimate, coefficient_bound, rescaled_rho, unit_disc_samples
from .schema import SequenceFile

logger = logging.getLogger("pscale")

KINDS = ("normal", "cone", "tangential", "explicit")


def _exact(value) -> Fraction:
    if isinstance(value, str):
        text = value.strip()
        sign = -1 if text.startswith("-") else 1
        return sign * parse_number(text.lstrip("+-"))
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def _exact_complex(value) -> ComplexScalar:
    "A number, a 're,im' string or a [re, im] pair"
    if isinstance(value, (list, tuple)):
        re, im = value
        return ComplexScalar(_exact(re), _exact(im))
    if isinstance(value, str) and "," in value:
        return parse_point(value)[0]
    return ComplexScalar(_exact(value))


@dataclass(frozen=True)
class SequenceSpec:
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)
    jmax: int = JMAX

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ParseError(f"unknown sequence kind {self.kind!r}")
        if self.jmax < 1:
            raise ParseError("jmax must be >= 1")
        if self.kind == "explicit" and len(self.points) < self.jmax:
            raise ParseError(f"explicit sequence has {len(self.points)} points, jmax is {self.jmax}")

    @classmethod
    def from_json(cls, data, jmax: Optional[int] = None) -> "SequenceSpec":
        f = SequenceFile.from_dict(data)
        params = dict(f.params)
        limit = f.jmax
        if f.kind == "explicit" and "jmax" not in data:
            limit = len(params.get("points", ()))
        seq = cls(f.kind, params, limit)
        return seq if jmax is None else seq.with_jmax(jmax)

    @classmethod
    def normal(cls, jmax: int = JMAX) -> "SequenceSpec":
        return cls("normal", {}, jmax)

    @classmethod
    def tangential(cls, p1: int, pn: int, jmax: int = JMAX) -> "SequenceSpec":
        return cls("tangential", {"powers": [p1, pn]}, jmax)

    @classmethod
    def cone(cls, direction: Sequence, aperture=1, jmax: int = JMAX) -> "SequenceSpec":
        return cls("cone", {"direction": list(direction), "aperture": aperture}, jmax)

    @classmethod
    def explicit(cls, points: Sequence[Sequence]) -> "SequenceSpec":
        return cls("explicit", {"points": [list(p) for p in points]}, len(points))

    @property
    def points(self) -> List[Tuple[ComplexScalar, ...]]:
        raw = self.params.get("points")
        if not isinstance(raw, list) or not raw:
            raise ParseError("explicit sequence needs a nonempty 'points' list")
        out = []
        for p in raw:
            if isinstance(p, str):
                out.append(parse_point(p))
            else:
                out.append(tuple(_exact_complex(x) for x in p))
        return out

    def with_jmax(self, jmax: int) -> "SequenceSpec":
        return SequenceSpec(self.kind, self.params, jmax)

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": self.params, "jmax": self.jmax}


def generate_sequence(spec: DomainSpec, seq: SequenceSpec, j: int) -> Tuple[ComplexScalar, ...]:
    if not 1 <= j <= seq.jmax:
        raise ValueError(f"j = {j} outside 1..{seq.jmax}")
    n = spec.n
    zero = ComplexScalar(0)
    if seq.kind == "normal":
        point = (zero,) * (n - 1) + (ComplexScalar(Fraction(-1, j)),)
    elif seq.kind == "cone":
        direction = [_exact_complex(x) for x in seq.params.get("direction", ())]
        if len(direction) != n - 1:
            raise ParseError(f"cone direction needs {n - 1} coordinates")
        aperture = _exact(seq.params.get("aperture", 1))
        z = tuple(d * aperture / j for d in direction)
        point = z + (ComplexScalar(Fraction(-1, j) - spec.F.evaluate_exact(z).re),)
    elif seq.kind == "tangential":
        powers = seq.params.get("powers")
        if not isinstance(powers, (list, tuple)) or len(powers) != 2:
            raise ParseError("tangential sequence needs powers [p1, pn]")
        p1, pn = (int(p) for p in powers)
        z = (ComplexScalar(Fraction(1, j**p1)),) + (zero,) * (n - 2)
        f = spec.F.evaluate_exact(z)
        point = z + (ComplexScalar(-Fraction(1, j**pn) - f.re),)
    else:
        point = seq.points[j - 1]
        if len(point) != n:
            raise ParseError(f"explicit point {j} has {len(point)} coordinates, expected {n}")
    if spec.defining_value_exact(point) >= 0:
        raise NotInteriorError(f"sequence point j={j} is not interior")
    return point


@dataclass(frozen=True)
class Stage:
    """One step of the scaling sequence."""

    j: int
    eta: Tuple
    eta_prime: Tuple
    epsilon: Any
    norm: NormalizationResult = field(repr=False)
    scaling: ScalingData = field(repr=False)
    q_max: float = 0.0
    q_verdict: str = "not-applicable"
    bound: float = 0.0
    base_image: Tuple[complex, ...] = ()

    @property
    def coefficients(self) -> Dict[Tuple[int, int], complex]:
        return {(key.holo[0], key.anti[0]): complex(c) for key, c in self.scaling.P}


def scale_at(spec: DomainSpec, eta: Sequence, m: int, j: int = 0, samples: int = Q_SAMPLES) -> Stage:
    eta_prime, epsilon = lift_to_boundary(spec, eta)
    norm = normalize_at(spec, eta_prime, m)
    sd = rescaled_rho(spec, norm, epsilon, m)
    q = check_q_estimate(sd, Q_EXPONENT, samples)
    logger.debug("j=%d eps=%s tau=%s max|Q|=%g", j, epsilon, sd.tau, q.max_q)
    return Stage(
        j=j,
        eta=tuple(eta),
        eta_prime=eta_prime,
        epsilon=epsilon,
        norm=norm,
        scaling=sd,
        q_max=q.max_q,
        q_verdict=q.verdict,
        bound=coefficient_bound(sd),
        base_image=scaled_base_point(norm, sd.scales, eta),
    )


def scaling_sequence(spec: DomainSpec, seq: SequenceSpec, m: Optional[int] = None) -> List[Stage]:
    m = dangelo_type_z1(spec).m if m is None else m
    return [scale_at(spec, generate_sequence(spec, seq, j), m, j) for j in range(1, seq.jmax + 1)]


@dataclass(frozen=True)
class LimitReport:
    P_limit: RealPoly
    coeff_trace: Tuple[Dict[Tuple[int, int], complex], ...]
    q_decay: Tuple[float, ...]
    tau_trace: Tuple[float, ...]
    eps_trace: Tuple[float, ...]
    converged: bool
    model: Optional[ModelClass]
    bound_trace: Tuple[float, ...] = ()
    q_verdicts: Tuple[str, ...] = ()
    base_point_images: Tuple[Tuple[complex, ...], ...] = ()
    tol: float = LIMIT_TOL
    window: int = WINDOW

    @property
    def strongly_pseudoconvex(self) -> bool:
        return bool(self.model and self.model.is_strongly_pseudoconvex_model)

    def summary(self, n: int) -> str:
        extra = " + sum|w_a|^2" if n > 2 else ""
        yes = "yes" if self.strongly_pseudoconvex else "no"
        return f"limit model: Re w_{n} + ({self.P_limit.to_expression()}){extra}; strongly pseudoconvex: {yes}"


def _distance(a: Dict, b: Dict) -> float:
    keys = set(a) | set(b)
    return max((abs(a.get(k, 0) - b.get(k, 0)) for k in keys), default=0.0)


def tail_converged(trace: Sequence[Dict], q_decay: Sequence[float], tol: float, window: int) -> bool:
    "Last window coefficient vectors pairwise within tol and max|Q| below tol"
    if len(trace) < window:
        return False
    tail = trace[-window:]
    for i in range(window):
        for k in range(i + 1, window):
            if _distance(tail[i], tail[k]) > tol:
                return False
    return all(q < tol for q in q_decay[-window:])


def _limit_poly(stage: Stage, tol: float) -> RealPoly:
    "Final P, with exact coefficients kept and binary64 noise below tol dropped"
    P = stage.scaling.P
    if not P.is_exact:
        P = P.chop(tol)
    return RealPoly.of(P, tol=1e-9)


def build_report(stages: Sequence[Stage], tol: float, window: int, samples: int) -> LimitReport:
    trace = tuple(s.coefficients for s in stages)
    q_decay = tuple(s.q_max for s in stages)
    converged = tail_converged(trace, q_decay, tol, window)
    P = _limit_poly(stages[-1], tol)
    model = None
    try:
        model = classify_model(P, samples)
    except HypothesisError:
        logger.exception("classify_model")
    if not converged:
        logger.warning("scaling sequence did not converge within jmax=%d", len(stages))
    return LimitReport(
        P_limit=P,
        coeff_trace=trace,
        q_decay=q_decay,
        tau_trace=tuple(float(s.scaling.tau) for s in stages),
        eps_trace=tuple(float(s.epsilon) for s in stages),
        converged=converged,
        model=model,
        bound_trace=tuple(s.bound for s in stages),
        q_verdicts=tuple(s.q_verdict for s in stages),
        base_point_images=tuple(s.base_image for s in stages),
        tol=tol,
        window=window,
    )


async def async_limit_polynomial(
    spec: DomainSpec,
    seq: SequenceSpec,
    tol: float = LIMIT_TOL,
    window: int = WINDOW,
    samples: int = SUBHARMONIC_SAMPLES,
    m: Optional[int] = None,
    batch_size: int = BATCH_SIZE,
) -> LimitReport:
    if window < 2 or seq.jmax < window:
        raise ValueError("need jmax >= window >= 2")
    report = validate_normal_form(spec)
    if not report.passed:
        raise HypothesisError("domain is not in normal form: " + ", ".join(report.failed))
    m = dangelo_type_z1(spec).m if m is None else m
    points = [generate_sequence(spec, seq, j) for j in range(1, seq.jmax + 1)]
    stages = await ordered_map(
        lambda jp: scale_at(spec, jp[1], m, jp[0]), list(enumerate(points, start=1)), batch_size
    )
    return build_report(stages, tol, window, samples)


def limit_polynomial(
    spec: DomainSpec,
    seq: SequenceSpec,
    tol: float = LIMIT_TOL,
    window: int = WINDOW,
    samples: int = SUBHARMONIC_SAMPLES,
    m: Optional[int] = None,
) -> LimitReport:
    return wait_for(async_limit_polynomial(spec, seq, tol, window, samples, m))


@dataclass(frozen=True)
class ProbePoint:
    point: Tuple[complex, ...]
    interior: bool
    j0: Optional[int]


@dataclass(frozen=True)
class ProbeReport:
    points: Tuple[ProbePoint, ...]
    jmax: int
    window: int

    @property
    def passed(self) -> bool:
        return all(p.j0 is not None and p.j0 <= self.jmax - self.window + 1 for p in self.points)

    @property
    def failures(self) -> Tuple[ProbePoint, ...]:
        return tuple(
            p for p in self.points if p.j0 is None or p.j0 > self.jmax - self.window + 1
        )


def model_grid(
    P: Poly,
    n: int,
    count: int = PROBE_POINTS,
    margin: float = PROBE_MARGIN,
    seed: int = SEED,
    radius: float = 1.0,
) -> List[Tuple[Tuple[complex, ...], bool]]:
    """Points at distance margin + s (s in [0, 0.1]) inside or outside M_P.

    w1 and w_a are drawn from the polydisc of the given radius; Re w_n is
    placed relative to the model boundary. Alternates interior/exterior.
    """
    rng = np.random.default_rng(seed)
    grid = []
    for i in range(count):
        interior = i % 2 == 0
        r = radius * np.sqrt(rng.uniform(0, 1, n - 1))
        w = [complex(x) for x in r * np.exp(2j * np.pi * rng.uniform(0, 1, n - 1))]
        level = P.evaluate(w[:1]).real + sum(abs(x) ** 2 for x in w[1:])
        offset = margin + 0.1 * rng.uniform(0, 1)
        re_wn = -level - offset if interior else -level + offset
        grid.append((tuple(w) + (complex(re_wn, rng.uniform(-radius, radius)),), interior))
    return grid


def domain_convergence_probe(
    spec: DomainSpec,
    seq: SequenceSpec,
    candidate_P: Poly,
    grid: Optional[Sequence[Tuple[Sequence, bool]]] = None,
    window: int = WINDOW,
    m: Optional[int] = None,
) -> ProbeReport:
    """Sampled domain convergence of the rescaled domains to M_P.

    j0 is the first index from which rescaled rho_j has the sign expected for
    the point (negative inside M_P, positive outside) for every later j.
    """
    if grid is None:
        grid = model_grid(candidate_P, spec.n)
    stages = scaling_sequence(spec, seq, m)
    values = np.array(
        [stage.scaling.rescaled_rho.evaluate_many([p for p, _ in grid]).real for stage in stages]
    )
    results = []
    for i, (point, interior) in enumerate(grid):
        good = values[:, i] < 0 if interior else values[:, i] > 0
        j0 = None
        for k in range(len(stages) - 1, -1, -1):
            if not good[k]:
                break
            j0 = stages[k].j
        results.append(ProbePoint(tuple(complex(x) for x in point), interior, j0))
    return ProbeReport(tuple(results), seq.jmax, window)


def least_squares_p(sd: ScalingData, m: int, samples: int = 200, seed: int = SEED) -> Dict[Tuple[int, int], complex]:
    """Independent fit of P from values of the rescaled defining function.

    Samples rescaled_rho(w1, 0, ..., 0) - Re w_n on |w1| <= 1 and solves for
    the coefficients of w1^j wb1^k by least squares.
    """
    rho = sd.rescaled_rho
    n = rho.nvars
    degree = max(2 * m, max((key.holo[0] + key.anti[0] for key, _ in rho if key.involves_only(1)), default=0))
    monomials = [(j, t - j) for t in range(1, degree + 1) for j in range(0, t + 1)]
    w1 = unit_disc_samples(max(samples, 2 * len(monomials)), seed)
    points = np.zeros((len(w1), n), dtype=complex)
    points[:, 0] = w1
    values = rho.evaluate_many(points)
    design = np.column_stack([w1**j * np.conj(w1) ** k for j, k in monomials])
    coeffs, *_ = np.linalg.lstsq(design, values, rcond=None)
    return {(j, k): complex(c) for (j, k), c in zip(monomials, coeffs) if j > 0 and k > 0 and j + k <= 2 * m}
