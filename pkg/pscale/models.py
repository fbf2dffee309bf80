"""Model polynomials and model domains M_P = {Re w_n + P(w1) + sum |w_a|^2 < 0}."""
import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .config import MATCH_TOL, SEED, SUBHARMONIC_RADII, SUBHARMONIC_SAMPLES, SUBHARMONIC_TOL
from .cpoly import HoloMap, Poly, RealPoly, laplacian_z1
from .cscalar import ComplexScalar, exact_sqrt
from .errors import HarmonicTermError, ModelSpaceError

logger = logging.getLogger("pscale")


def harmonic_terms(P: Poly) -> Tuple:
    return tuple(key for key, _ in P if key.holo[0] == 0 or key.anti[0] == 0)


def _require_univariate(P: Poly) -> None:
    if P.nvars != 1:
        raise ValueError(f"model polynomial must be univariate, got nvars={P.nvars}")


@dataclass(frozen=True)
class ModelClass:
    is_subharmonic: bool
    laplacian_nontrivial: bool
    degree: int
    is_homogeneous: bool
    is_strongly_pseudoconvex_model: bool
    c: Optional[float] = None
    min_laplacian: float = 0.0


def _circle_minimum(component: Poly, samples: int) -> float:
    "min over the unit circle of a homogeneous component, normalized by its largest coefficient"
    scale = max(abs(c) for _, c in component)
    theta = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    values = component.evaluate_many(np.exp(1j * theta).reshape(-1, 1)).real
    return float(values.min() / scale)


def _radial_minimum(L: Poly, samples: int, radii: int, seed: int) -> float:
    "min of L at log-uniform radii, normalized by sum_d r^d max|coeff_d|"
    rng = np.random.default_rng(seed)
    r = 10.0 ** rng.uniform(-3, 3, size=radii)
    theta = rng.uniform(0, 2 * np.pi, size=samples)
    points = (r[:, None] * np.exp(1j * theta)[None, :]).reshape(-1, 1)
    values = L.evaluate_many(points).real
    radius = np.abs(points[:, 0])
    scale = np.zeros_like(radius)
    for d, comp in L.homogeneous_components().items():
        scale += radius**d * max(abs(c) for _, c in comp)
    return float((values / scale).min())


def _single_radial_power(L: Poly) -> Optional[bool]:
    "Exact nonnegativity when L is c |z|^(2k); None otherwise"
    if len(L) != 1:
        return None
    ((key, c),) = list(L)
    if key.holo[0] != key.anti[0]:
        return None
    if isinstance(c, ComplexScalar):
        return c.im == 0 and c.re > 0
    return c.imag == 0 and c.real > 0


def classify_model(
    P: Poly, samples: int = SUBHARMONIC_SAMPLES, radii: int = SUBHARMONIC_RADII, seed: int = SEED
) -> ModelClass:
    _require_univariate(P)
    if harmonic_terms(P):
        raise HarmonicTermError(f"model polynomial {P.to_expression()} has harmonic terms")
    L = laplacian_z1(P)
    nontrivial = not L.is_zero
    if not nontrivial:
        subharmonic, lowest = True, 0.0
    else:
        exact = _single_radial_power(L)
        if exact is not None:
            subharmonic, lowest = exact, 0.0 if exact else -1.0
        else:
            # boundary components decide sign near 0 and infinity; the rest is sampled radially
            components = L.homogeneous_components()
            degrees = sorted(components)
            lowest = min(_circle_minimum(components[d], samples) for d in {degrees[0], degrees[-1]})
            if lowest >= -SUBHARMONIC_TOL:
                lowest = min(lowest, _radial_minimum(L, samples, radii, seed))
            subharmonic = lowest >= -SUBHARMONIC_TOL
    c = None
    strongly = False
    if len(P) == 1:
        ((key, coeff),) = list(P)
        value = complex(coeff)
        if key.holo == (1,) and key.anti == (1,) and value.imag == 0 and value.real > 0:
            strongly = True
            c = value.real
    return ModelClass(
        is_subharmonic=subharmonic,
        laplacian_nontrivial=nontrivial,
        degree=P.degree,
        is_homogeneous=bool(len(P)) and P.is_homogeneous,
        is_strongly_pseudoconvex_model=strongly,
        c=c,
        min_laplacian=lowest,
    )


def in_model_space(P: Poly, m: int) -> bool:
    "Real-valued, univariate, degree <= 2m, no harmonic terms"
    return (
        P.nvars == 1
        and P.is_hermitian(1e-9)
        and P.degree <= 2 * m
        and not harmonic_terms(P)
    )


def in_homogeneous_model_space(H: Poly, samples: int = SUBHARMONIC_SAMPLES) -> bool:
    "Homogeneous of even degree, subharmonic, without harmonic terms"
    if H.nvars != 1 or H.is_zero or not H.is_homogeneous or H.degree % 2:
        return False
    if not in_model_space(H, H.degree // 2):
        return False
    model = classify_model(H, samples)
    return model.is_subharmonic and model.laplacian_nontrivial


@dataclass(frozen=True)
class ModelMatch:
    lam: float
    nu: float
    phase_free: bool = False
    residual: float = 0.0


def _nu_candidates(q: complex, h: complex, d: int) -> Tuple[float, ...]:
    "nu in [0, 2pi) with e^(i d nu) = phase(q / h)"
    phase = cmath.phase(q / h) % (2 * math.pi)
    step = 2 * math.pi / abs(d)
    base = (phase / d) % step
    return tuple(base + t * step for t in range(abs(d)))


def match_top_homogeneous(Q: Poly, H: Poly, tol: float = MATCH_TOL) -> Optional[ModelMatch]:
    """Find lam > 0, nu in [0, 2pi) with Q_top(z) = lam H(e^(i nu) z).

    Coefficientwise: q_jk = lam e^(i (j - k) nu) h_jk.
    """
    _require_univariate(Q)
    if not in_homogeneous_model_space(H):
        raise ModelSpaceError(f"{H.to_expression()} is not a homogeneous subharmonic model polynomial")
    top = H.degree
    if Q.degree > top:
        raise ModelSpaceError(f"deg Q = {Q.degree} exceeds deg H = {top}")
    if Q.degree < top:
        return None
    q_top = Q.homogeneous_part(top)
    scale = max(abs(c) for _, c in q_top)
    h_terms = {key: complex(c) for key, c in H}
    q_terms = {key: complex(c) for key, c in q_top if abs(c) > tol * scale}
    if set(q_terms) != set(h_terms):
        return None
    ratios = {key: q_terms[key] / h for key, h in h_terms.items()}
    lam = max(abs(r) for r in ratios.values())
    if lam <= 0:
        return None
    mixed = [(key, r) for key, r in ratios.items() if key.holo[0] != key.anti[0]]
    if not mixed:
        candidates = (0.0,)
    else:
        key, r = mixed[0]
        candidates = _nu_candidates(q_terms[key], h_terms[key], key.holo[0] - key.anti[0])

    def residual(nu: float) -> float:
        return max(
            abs(q_terms[k] - lam * cmath.exp(1j * (k.holo[0] - k.anti[0]) * nu) * h)
            for k, h in h_terms.items()
        )

    for nu in sorted(candidates):
        err = residual(nu)
        if err <= tol * max(1.0, scale):
            return ModelMatch(lam, nu % (2 * math.pi), phase_free=not mixed, residual=err)
    return None


def model_defining_function(P: Poly, n: int) -> RealPoly:
    "Re w_n + P(w1, wb1) + sum_{a=2}^{n-1} |w_a|^2 in n variables"
    _require_univariate(P)
    if n < 2:
        raise ValueError("n must be >= 2")
    rho = Poly.var(n, n).real_part() + P.lift(n)
    for a in range(2, n):
        rho = rho + Poly.var(a, n).abs2()
    return RealPoly.of(rho, tol=1e-9)


def in_model_domain(P: Poly, point: Sequence, margin: float = 0.0) -> bool:
    n = len(point)
    value = complex(point[-1]).real + P.evaluate(point[:1]).real
    value += sum(abs(complex(x)) ** 2 for x in point[1 : n - 1])
    return value < -margin


def siegel_rescaling(c, n: int) -> HoloMap:
    """Linear map u -> w with w1 = u1 / sqrt(c) taking the Siegel half-space
    {Re u_n + sum |u_k|^2 < 0} onto M_{c |z1|^2}."""
    if float(c) <= 0:
        raise ValueError("c must be positive")
    root = exact_sqrt(Fraction(c)) if isinstance(c, (int, Fraction)) else None
    inv = 1 / root if root is not None else 1 / math.sqrt(float(c))
    return HoloMap.diagonal((inv,) + (1,) * (n - 1))


def siegel_to_ball(w: Sequence) -> Tuple[complex, ...]:
    "Cayley transform onto the unit ball: zeta_n = (1 + w_n)/(1 - w_n), zeta' = 2 w'/(1 - w_n)"
    w = [complex(x) for x in w]
    d = 1 - w[-1]
    if d == 0:
        raise ZeroDivisionError("w_n = 1 is not in the domain of the Cayley transform")
    return tuple(2 * x / d for x in w[:-1]) + ((1 + w[-1]) / d,)


def ball_to_siegel(zeta: Sequence) -> Tuple[complex, ...]:
    "Inverse Cayley transform: w_n = (zeta_n - 1)/(zeta_n + 1), w' = zeta'/(zeta_n + 1)"
    zeta = [complex(x) for x in zeta]
    d = zeta[-1] + 1
    if d == 0:
        raise ZeroDivisionError("zeta_n = -1 is not in the domain of the inverse Cayley transform")
    return tuple(x / d for x in zeta[:-1]) + ((zeta[-1] - 1) / d,)
