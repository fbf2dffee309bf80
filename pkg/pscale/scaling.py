"""Coefficient maxima, the scale tau(eta, delta) and the rescaled defining function."""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import polars as pl

from .config import BOUND_SLACK, Q_EXPONENT, Q_SAMPLES, SEED, TAU_SMALL
from .cpoly import HoloMap, Poly, RealPoly
from .cscalar import ComplexScalar, exact_root, exact_sqrt
from .domain import DomainSpec, dangelo_type_z1
from .errors import FiniteTypeError
from .normalize import NormalizationResult, normalize_at

logger = logging.getLogger("pscale")

Real = Union[Fraction, float]

# candidates within this relative distance of the minimum tie
TIE_TOL = 1e-12


def _exact_real(x) -> Optional[Fraction]:
    if isinstance(x, ComplexScalar) and x.im == 0:
        return x.re
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return None


@dataclass(frozen=True)
class CoefficientMaxima:
    m: int
    A: Dict[int, float]
    B: Dict[int, float]
    # exact squared maxima, None when a table entry is binary64
    A_sq: Dict[int, Optional[Fraction]] = field(default_factory=dict)
    B_sq: Dict[int, Optional[Fraction]] = field(default_factory=dict)


def _max_abs(values: Iterable) -> Tuple[float, Optional[Fraction]]:
    values = list(values)
    if not values:
        return 0.0, Fraction(0)
    largest = max(abs(v) for v in values)
    if all(isinstance(v, ComplexScalar) for v in values):
        return float(largest), max(v.abs2() for v in values)
    return float(largest), None


def coefficient_maxima(norm: NormalizationResult, m: Optional[int] = None) -> CoefficientMaxima:
    m = norm.m if m is None else m
    A, A_sq, B, B_sq = {}, {}, {}, {}
    for l in range(2, 2 * m + 1):
        A[l], A_sq[l] = _max_abs(c for (j, k), c in norm.a_table.items() if j + k == l)
    for l in range(2, m + 1):
        B[l], B_sq[l] = _max_abs(c for (_, j, k), c in norm.b_table.items() if j + k == l)
    return CoefficientMaxima(m, A, B, A_sq, B_sq)


@dataclass(frozen=True)
class TauCandidate:
    kind: str  # "A" or "B"
    index: int
    value: float
    exact: Optional[Fraction] = None


@dataclass(frozen=True)
class TauResult:
    value: float
    exact: Optional[Fraction]
    candidates: Tuple[TauCandidate, ...]
    active: Tuple[Tuple[str, int], ...]

    @property
    def scalar(self) -> Real:
        return self.exact if self.exact is not None else self.value


def tau_terms(maxima: CoefficientMaxima, delta: Real, m: Optional[int] = None) -> TauResult:
    """All finite candidates of min{(delta/A_l)^(1/l), (delta^(1/2)/B_l')^(1/l')}.

    Zero maxima are skipped. The winning value is exact when delta and the
    winning maximum are rational and the root is rational.
    """
    m = maxima.m if m is None else m
    if delta <= 0:
        raise ValueError("delta must be positive")
    if maxima.A.get(2 * m, 0.0) == 0:
        raise FiniteTypeError(f"finite-type hypothesis violated at this point: A_{2 * m} = 0")
    d_exact = _exact_real(delta)
    d = float(delta)
    candidates: List[TauCandidate] = []
    for l in range(2, 2 * m + 1):
        a = maxima.A.get(l, 0.0)
        if a == 0:
            continue
        exact = None
        a_sq = maxima.A_sq.get(l)
        if d_exact is not None and a_sq:
            exact = exact_root(d_exact * d_exact / a_sq, 2 * l)
        candidates.append(TauCandidate("A", l, (d / a) ** (1 / l), exact))
    for l in range(2, m + 1):
        b = maxima.B.get(l, 0.0)
        if b == 0:
            continue
        exact = None
        b_sq = maxima.B_sq.get(l)
        if d_exact is not None and b_sq:
            exact = exact_root(d_exact / b_sq, 2 * l)
        candidates.append(TauCandidate("B", l, (math.sqrt(d) / b) ** (1 / l), exact))
    value = min(c.value for c in candidates)
    tied = [c for c in candidates if c.value <= value * (1 + TIE_TOL)]
    exact = next((c.exact for c in tied if c.exact is not None), None)
    return TauResult(
        float(exact) if exact is not None else value,
        exact,
        tuple(candidates),
        tuple((c.kind, c.index) for c in tied),
    )


def tau(maxima: CoefficientMaxima, delta: Real, m: Optional[int] = None) -> float:
    return tau_terms(maxima, delta, m).value


def _check_scales(scales: Sequence) -> None:
    for s in scales:
        if float(_real(s)) <= 0:
            raise ValueError(f"dilation scales must be positive, got {s}")


def _real(x):
    if isinstance(x, ComplexScalar):
        if x.im != 0:
            raise ValueError("dilation scales must be real")
        return x.re
    if isinstance(x, complex):
        return x.real
    return x


def dilation(scales: Sequence, obj):
    """Point form: w_k / tau_k. Poly form: the inverse dilation w_k -> tau_k w_k."""
    _check_scales(scales)
    if isinstance(obj, Poly):
        out = obj.substitute(HoloMap.diagonal(scales))
        return RealPoly.of(out, tol=1e-9) if isinstance(obj, RealPoly) else out
    if len(obj) != len(scales):
        raise ValueError("point and scales differ in length")
    if all(isinstance(x, (ComplexScalar, Fraction, int)) for x in obj) and all(
        _exact_real(s) is not None for s in scales
    ):
        return tuple(ComplexScalar.coerce(x) / _exact_real(s) for x, s in zip(obj, scales))
    return tuple(complex(x) / float(_real(s)) for x, s in zip(obj, scales))


def inverse_dilation(scales: Sequence, point: Sequence) -> Tuple:
    _check_scales(scales)
    return tuple(complex(x) * float(_real(s)) for x, s in zip(point, scales))


def _sqrt(x: Real) -> Real:
    if isinstance(x, Fraction):
        root = exact_sqrt(x)
        if root is not None:
            return root
    return math.sqrt(x)


def _power(x: Real, k: int) -> Real:
    return x**k


def _inverse(x: Real) -> Real:
    return 1 / x if isinstance(x, Fraction) else 1.0 / x


@dataclass(frozen=True)
class ScalingData:
    epsilon: Real
    tau: Real
    scales: Tuple[Real, ...]
    P: RealPoly
    Q: Dict[int, Poly]
    rescaled_rho: RealPoly
    tau_info: Optional[TauResult] = None
    m: int = 1

    def __post_init__(self) -> None:
        if float(self.epsilon) <= 0 or float(self.tau) <= 0:
            raise ValueError("epsilon and tau must be positive")
        bound = coefficient_bound(self)
        if bound > 1 + BOUND_SLACK:
            raise ValueError(f"rescaled coefficient {bound} exceeds 1")

    @property
    def exact(self) -> bool:
        return self.rescaled_rho.is_exact


def coefficient_bound(sd: ScalingData) -> float:
    "Largest coefficient modulus over P and the Q^alpha"
    values = [abs(c) for _, c in sd.P]
    for q in sd.Q.values():
        values.extend(abs(c) for _, c in q)
    return float(max(values, default=0.0))


def model_polys(norm: NormalizationResult, epsilon: Real, tau_value: Real) -> Tuple[RealPoly, Dict[int, Poly]]:
    """P = sum a_jk eps^-1 tau^(j+k) w^j wb^k and Q^a = sum b^a_jk eps^-1/2 tau^(j+k) w^j wb^k."""
    inv_eps = _inverse(epsilon)
    inv_sqrt_eps = _inverse(_sqrt(epsilon))
    P = RealPoly.of(
        Poly(
            {((j,), (k,)): c * inv_eps * _power(tau_value, j + k) for (j, k), c in norm.a_table.items()},
            1,
        ),
        tol=1e-9,
    )
    Q: Dict[int, Poly] = {}
    for a in range(2, norm.n):
        Q[a] = Poly(
            {
                ((j,), (k,)): c * inv_sqrt_eps * _power(tau_value, j + k)
                for (b, j, k), c in norm.b_table.items()
                if b == a
            },
            1,
        )
    return P, Q


def extract_model_terms(rescaled: Poly, m: int) -> Tuple[RealPoly, Dict[int, Poly]]:
    """P and Q^a read back from a rescaled defining function by coefficient scan."""
    n = rescaled.nvars
    P_terms = {}
    for total in range(2, 2 * m + 1):
        for j in range(1, total):
            P_terms[(j,), (total - j,)] = rescaled.coeff({1: j}, {1: total - j})
    Q: Dict[int, Poly] = {}
    for a in range(2, n):
        terms = {}
        for total in range(2, m + 1):
            for j in range(1, total):
                terms[(j,), (total - j,)] = rescaled.coeff({1: j, a: 1}, {1: total - j}) * 2
        Q[a] = Poly(terms, 1)
    return RealPoly.of(Poly(P_terms, 1), tol=1e-9), Q


def rescaled_rho(
    spec: DomainSpec, norm: NormalizationResult, epsilon: Real, m: Optional[int] = None
) -> ScalingData:
    """eps^-1 rho o phi^-1 o dilation^-1 along with P, Q and the scales."""
    m = norm.m if m is None else m
    epsilon = _exact_real(epsilon) if _exact_real(epsilon) is not None else float(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    info = tau_terms(coefficient_maxima(norm, m), epsilon, m)
    tau_value = info.scalar
    sqrt_eps = _sqrt(epsilon)
    scales = (tau_value,) + (sqrt_eps,) * (spec.n - 2) + (epsilon,)
    rescaled = dilation(scales, norm.transformed).scale(_inverse(epsilon))
    P, Q = model_polys(norm, epsilon, tau_value)
    logger.debug("rescaled %s: eps=%s tau=%s active=%s", spec.label, epsilon, tau_value, info.active)
    return ScalingData(
        epsilon=epsilon,
        tau=tau_value,
        scales=scales,
        P=P,
        Q=Q,
        rescaled_rho=RealPoly.of(rescaled, tol=1e-9),
        tau_info=info,
        m=m,
    )


@dataclass(frozen=True)
class QEstimateReport:
    max_q: float
    bound: float
    tau: float
    exponent: float
    samples: int
    verdict: str  # "pass", "fail" or "not-applicable"

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"


def unit_disc_samples(count: int, seed: int = SEED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0, 1, size=count))
    theta = rng.uniform(0, 2 * np.pi, size=count)
    return r * np.exp(1j * theta)


def max_q_modulus(sd: ScalingData, samples: int = Q_SAMPLES, seed: int = SEED) -> float:
    points = unit_disc_samples(samples, seed).reshape(-1, 1)
    best = 0.0
    for q in sd.Q.values():
        if q.is_zero:
            continue
        best = max(best, float(np.abs(q.evaluate_many(points)).max()))
    return best


def check_q_estimate(
    sd: ScalingData,
    exponent: float = Q_EXPONENT,
    samples: int = Q_SAMPLES,
    small: float = TAU_SMALL,
    seed: int = SEED,
) -> QEstimateReport:
    """Sampled |Q^a(w1)| <= tau^exponent on |w1| <= 1, applicable for small tau."""
    t = float(sd.tau)
    bound = t**exponent
    max_q = max_q_modulus(sd, samples, seed)
    if t >= small:
        verdict = "not-applicable"
    elif max_q <= bound:
        verdict = "pass"
    else:
        verdict = "fail"
        logger.warning("Q estimate fails: max|Q| = %g > tau^%g = %g", max_q, exponent, bound)
    return QEstimateReport(max_q, bound, t, exponent, samples, verdict)


@dataclass(frozen=True)
class SandwichReport:
    """Empirical constants c1 delta^(1/2) <= tau <= c2 delta^(1/(2m))."""

    table: pl.DataFrame = field(repr=False)
    per_delta: pl.DataFrame = field(repr=False)
    c1: float
    c2: float
    lower_stability: float
    upper_stability: float

    @property
    def stable(self) -> bool:
        return self.lower_stability <= 2 and self.upper_stability <= 2


DEFAULT_DELTAS = tuple(10.0**-k for k in range(1, 9))


def sandwich_constants(
    spec: DomainSpec,
    points: Sequence[Sequence],
    deltas: Sequence[float] = DEFAULT_DELTAS,
    m: Optional[int] = None,
) -> SandwichReport:
    m = dangelo_type_z1(spec).m if m is None else m
    rows = []
    for index, point in enumerate(points):
        maxima = coefficient_maxima(normalize_at(spec, point, m), m)
        for delta in deltas:
            t = tau(maxima, delta, m)
            rows.append(
                {
                    "point": index,
                    "delta": float(delta),
                    "tau": t,
                    "lower": t / delta**0.5,
                    "upper": t / delta ** (1 / (2 * m)),
                }
            )
    table = pl.DataFrame(rows)
    per_delta = (
        table.lazy()
        .group_by("delta")
        .agg(pl.col("lower").min().alias("c1"), pl.col("upper").max().alias("c2"))
        .sort("delta", descending=True)
        .collect()
    )
    c1_col = per_delta["c1"]
    c2_col = per_delta["c2"]
    return SandwichReport(
        table=table,
        per_delta=per_delta,
        c1=float(c1_col.min()),
        c2=float(c2_col.max()),
        lower_stability=float(c1_col.max() / c1_col.min()),
        upper_stability=float(c2_col.max() / c2_col.min()),
    )


def boundary_grid(spec: DomainSpec, count: int, radius: Fraction = Fraction(1, 5), seed: int = SEED):
    """Exact rational boundary points near 0, starting with the origin.

    z' has coordinates on a 1/100 lattice inside |z_k| <= radius, and
    z_n = -F(z') + i t with t rational.
    """
    rng = np.random.default_rng(seed)
    n = spec.n
    scale = 100
    bound = int(radius * scale / math.sqrt(2 * (n - 1)))
    points = [tuple(ComplexScalar(0) for _ in range(n))]
    while len(points) < count:
        coords = [
            ComplexScalar(Fraction(int(x), scale), Fraction(int(y), scale))
            for x, y in rng.integers(-bound, bound + 1, size=(n - 1, 2))
        ]
        t = Fraction(int(rng.integers(-bound, bound + 1)), scale)
        f = spec.F.evaluate_exact(coords)
        points.append(tuple(coords) + (ComplexScalar(-f.re, t),))
    return points
