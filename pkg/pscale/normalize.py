"""Normal form of a rigid defining function at a boundary point.

normalize_at builds a polynomial biholomorphism phi with phi(eta') = 0 as a
sequence of steps, each a map from new to old coordinates:

    translate            z = w + eta'
    gradient alignment   w_n -> w_n - 2 sum_k g_k w_k
    Levi block           (w_2..w_{n-1}) -> M (w_2..w_{n-1}),  M* K M = I
    harmonic shear       w_n -> w_n - 2 h(w'),  h the holomorphic part of degree <= 2m
    alpha shears         w_a -> w_a - c_{a,d} w_1^d,  d = 1..m
    harmonic shear       (closing sweep)

Afterwards rho o phi^-1 - rho(eta') = Re w_n + main part + remainder.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import INEXACT_TOL, NEIGHBORHOOD_RADIUS
from .cpoly import HoloMap, Multidegree, Poly, RealPoly
from .cscalar import ONE, ZERO, Coefficient, ComplexScalar, exact_sqrt
from .domain import DomainSpec, dangelo_type_z1
from .errors import BoundaryError, LeviBlockError, NotInteriorError

logger = logging.getLogger("pscale")

# binary64 coefficients below this are dropped between steps
CHOP_TOL = 1e-15


def as_point(point: Sequence) -> Tuple[Coefficient, ...]:
    return tuple(ComplexScalar.coerce(x) for x in point)


def point_is_exact(point: Sequence) -> bool:
    return all(isinstance(x, ComplexScalar) for x in point)


def lift_to_boundary(spec: DomainSpec, eta: Sequence):
    """Push an interior point up to the boundary along Re z_n.

    Returns (eta_prime, epsilon) with epsilon = -rho(eta) > 0; both exact
    when eta is.
    """
    eta = as_point(eta)
    if len(eta) != spec.n:
        raise BoundaryError(f"point has {len(eta)} coordinates, expected {spec.n}")
    if point_is_exact(eta):
        value = spec.defining_value_exact(eta)
    else:
        value = spec.defining_value(eta)
    if value >= 0:
        raise NotInteriorError(f"rho(eta) = {value} >= 0; point is not interior")
    epsilon = -value
    eta_prime = eta[:-1] + (eta[-1] + epsilon,)
    return eta_prime, epsilon


class Step(NamedTuple):
    name: str
    forward: HoloMap  # new -> old
    inverse: HoloMap  # old -> new


@dataclass(frozen=True)
class NormalizationResult:
    base_point: Tuple[Coefficient, ...]
    m: int
    phi: HoloMap
    phi_inv: HoloMap
    a_table: Dict[Tuple[int, int], Coefficient]
    b_table: Dict[Tuple[int, int, int], Coefficient]
    transformed: RealPoly
    main: RealPoly
    remainder: RealPoly
    steps: Tuple[str, ...]
    exact: bool

    @property
    def n(self) -> int:
        return self.transformed.nvars

    def violations(self, tol: float = 0) -> List[Tuple[str, Multidegree, Coefficient]]:
        """Monomials of the remainder that the normal form forbids.

        Main-part classes, plus the residual normal-form defects: harmonic
        terms in w' of degree <= 2m, w1^d zb_a cross terms with d <= m and
        off-diagonal Levi block terms.
        """
        n, m = self.n, self.m
        found = []
        for key, c in self.remainder:
            if abs(c) <= tol:
                continue
            kind = classify_monomial(key, n, m)
            if kind is not None:
                found.append((kind, key, c))
        return found

    def to_json(self) -> dict:
        def table_entry(c) -> dict:
            c = complex(c)
            return {"re": c.real, "im": c.imag}

        return {
            "base_point": [table_entry(x) for x in self.base_point],
            "m": self.m,
            "steps": list(self.steps),
            "exact": self.exact,
            "phi": list(self.phi.to_expressions()),
            "phi_inv": list(self.phi_inv.to_expressions()),
            "a": [{"j": j, "k": k, **table_entry(c)} for (j, k), c in self.a_table.items()],
            "b": [
                {"alpha": a, "j": j, "k": k, **table_entry(c)} for (a, j, k), c in self.b_table.items()
            ],
            "remainder": self.remainder.to_expression(),
        }


def classify_monomial(key: Multidegree, n: int, m: int) -> Optional[str]:
    holo, anti = key.holo, key.anti
    total = key.total
    if total == 0:
        return "constant"
    if holo[n - 1] or anti[n - 1]:
        return "w_n term"
    if total == 1:
        return "linear"
    j, k = holo[0], anti[0]
    # exponents of w_2..w_{n-1}
    alpha_h, alpha_a = sum(holo[1 : n - 1]), sum(anti[1 : n - 1])
    if not any(anti) or not any(holo):
        return "harmonic" if total <= 2 * m else None
    if alpha_h == 0 and alpha_a == 0:
        return "pure w1 mixed" if total <= 2 * m else None
    if alpha_h == 1 and alpha_a == 1 and j == k == 0:
        return "Levi block"
    if alpha_h + alpha_a == 1:
        if j and k:
            return "w_alpha mixed" if j + k <= m else None
        return "w_alpha cross" if j + k <= m else None
    return None


def _identity_components(n: int) -> List[Poly]:
    return [Poly.var(k, n) for k in range(1, n + 1)]


def _translation_step(eta_prime: Tuple) -> Step:
    return Step(
        "translate",
        HoloMap.translation(eta_prime),
        HoloMap.translation([-x for x in eta_prime]),
    )


def _gradient_step(R: Poly) -> Optional[Step]:
    n = R.nvars
    g_n = R.coeff({n: 1})
    if abs(complex(g_n) - 0.5) > INEXACT_TOL:
        raise ValueError(f"unexpected w_n gradient coefficient {g_n}")
    g = [R.coeff({k: 1}) for k in range(1, n)]
    if all(c == 0 for c in g):
        return None
    lin = Poly.zero(n)
    for k, c in enumerate(g, start=1):
        lin = lin + Poly.var(k, n) * c
    fwd = _identity_components(n)
    inv = _identity_components(n)
    fwd[n - 1] = Poly.var(n, n) - lin * 2
    inv[n - 1] = Poly.var(n, n) + lin * 2
    return Step("gradient alignment", HoloMap(fwd, n), HoloMap(inv, n))


def _exact_levi_factors(K: List[List[ComplexScalar]]):
    """M, M^-1 with M* K M = I from an exact LDL* factorization.

    None when a pivot has no rational square root.
    """
    k = len(K)
    L = [[ONE if i == j else ZERO for j in range(k)] for i in range(k)]
    D: List[Fraction] = []
    for j in range(k):
        d = K[j][j]
        for p in range(j):
            d = d - L[j][p] * L[j][p].conjugate() * D[p]
        if d.im != 0 or d.re <= 0:
            raise LeviBlockError(f"Levi block is not positive definite (pivot {d})")
        D.append(d.re)
        for i in range(j + 1, k):
            s = K[i][j]
            for p in range(j):
                s = s - L[i][p] * L[j][p].conjugate() * D[p]
            L[i][j] = s / d.re
    roots = [exact_sqrt(d) for d in D]
    if any(r is None for r in roots):
        return None
    U = [[L[j][i].conjugate() for j in range(k)] for i in range(k)]
    X = [[ZERO] * k for _ in range(k)]
    for c in range(k):
        for i in range(k - 1, -1, -1):
            s = ONE if i == c else ZERO
            for p in range(i + 1, k):
                s = s - U[i][p] * X[p][c]
            X[i][c] = s
    M = [[X[i][c] / roots[c] for c in range(k)] for i in range(k)]
    M_inv = [[U[i][c] * roots[i] for c in range(k)] for i in range(k)]
    return M, M_inv


def _numeric_levi_factors(K: List[List[Coefficient]]):
    A = np.array([[complex(c) for c in row] for row in K], dtype=complex)
    A = (A + A.conj().T) / 2
    try:
        C = np.linalg.cholesky(A)
    except np.linalg.LinAlgError as e:
        raise LeviBlockError("Levi block is singular or indefinite") from e
    M_inv = C.conj().T
    M = np.linalg.inv(M_inv)
    return M.tolist(), M_inv.tolist()


def _levi_step(R: Poly) -> Optional[Step]:
    n = R.nvars
    block = range(2, n)
    if not block:
        return None
    # K = B^T where B_ab = coeff(w_a zb_b)
    K = [[R.coeff({b: 1}, {a: 1}) for b in block] for a in block]
    k = len(K)
    if all(K[i][j] == (1 if i == j else 0) for i in range(k) for j in range(k)):
        return None
    factors = None
    if all(isinstance(c, ComplexScalar) for row in K for c in row):
        factors = _exact_levi_factors(K)
    if factors is None:
        logger.warning("Levi block normalized in binary64; exactness is lost")
        factors = _numeric_levi_factors(K)
    M, M_inv = factors

    def embed(block_matrix):
        full = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
        for i in range(k):
            for j in range(k):
                full[i + 1][j + 1] = block_matrix[i][j]
        return full

    return Step("Levi block", HoloMap.linear(embed(M)), HoloMap.linear(embed(M_inv)))


def _harmonic_part(R: Poly, max_degree: int) -> Poly:
    "Holomorphic terms in w' (no w_n) of degree 1..max_degree"
    n = R.nvars
    return Poly(
        {
            key: c
            for key, c in R
            if not any(key.anti) and key.holo[n - 1] == 0 and 0 < key.total <= max_degree
        },
        n,
    )


def _harmonic_step(R: Poly, m: int, name: str) -> Optional[Step]:
    n = R.nvars
    h = _harmonic_part(R, 2 * m)
    if h.is_zero:
        return None
    fwd = _identity_components(n)
    inv = _identity_components(n)
    fwd[n - 1] = Poly.var(n, n) - h * 2
    inv[n - 1] = Poly.var(n, n) + h * 2
    return Step(name, HoloMap(fwd, n), HoloMap(inv, n))


def _alpha_shear_step(R: Poly, d: int) -> Optional[Step]:
    n = R.nvars
    fwd = _identity_components(n)
    inv = _identity_components(n)
    changed = False
    for a in range(2, n):
        c = R.coeff({1: d}, {a: 1})
        if c == 0:
            continue
        shear = Poly.monomial(n, {1: d}, coeff=c)
        fwd[a - 1] = Poly.var(a, n) - shear
        inv[a - 1] = Poly.var(a, n) + shear
        changed = True
    if not changed:
        return None
    return Step(f"w_alpha shear d={d}", HoloMap(fwd, n), HoloMap(inv, n))


def _tidy(R: Poly) -> RealPoly:
    if not R.is_exact:
        R = R.chop(CHOP_TOL)
    return RealPoly.of(R, tol=INEXACT_TOL)


def main_part(
    n: int,
    a_table: Dict[Tuple[int, int], Coefficient],
    b_table: Dict[Tuple[int, int, int], Coefficient],
) -> RealPoly:
    "Re w_n + sum a w1^j zb1^k + sum |w_a|^2 + sum Re(b w1^j zb1^k w_a)"
    terms = {
        Multidegree.of(n, {n: 1}): Fraction(1, 2),
        Multidegree.of(n, anti={n: 1}): Fraction(1, 2),
    }
    for (j, k), c in a_table.items():
        terms[Multidegree.of(n, {1: j}, {1: k})] = c
    for a in range(2, n):
        terms[Multidegree.of(n, {a: 1}, {a: 1})] = ONE
    main = Poly(terms, n)
    for (a, j, k), c in b_table.items():
        if c == 0:
            continue
        half = c / 2
        main = main + Poly.monomial(n, {1: j, a: 1}, {1: k}, coeff=half)
        main = main + Poly.monomial(n, {1: k}, {1: j, a: 1}, coeff=half.conjugate())
    return RealPoly.of(main, tol=INEXACT_TOL)


def coefficient_tables(R: Poly, m: int):
    n = R.nvars
    a_table = {}
    for total in range(2, 2 * m + 1):
        for j in range(1, total):
            a_table[j, total - j] = R.coeff({1: j}, {1: total - j})
    b_table = {}
    for a in range(2, n):
        for total in range(2, m + 1):
            for j in range(1, total):
                b_table[a, j, total - j] = R.coeff({1: j, a: 1}, {1: total - j}) * 2
    return a_table, b_table


def _compose_steps(steps: Sequence[Step], n: int) -> Tuple[HoloMap, HoloMap]:
    if not steps:
        identity = HoloMap.identity(n)
        return identity, identity
    phi_inv = steps[0].forward
    phi = steps[0].inverse
    for step in steps[1:]:
        phi_inv = phi_inv.compose(step.forward)
        phi = step.inverse.compose(phi)
    return phi, phi_inv


def normalize_at(
    spec: DomainSpec,
    eta_prime: Sequence,
    m: Optional[int] = None,
    radius: float = NEIGHBORHOOD_RADIUS,
) -> NormalizationResult:
    eta_prime = as_point(eta_prime)
    n = spec.n
    if len(eta_prime) != n:
        raise BoundaryError(f"point has {len(eta_prime)} coordinates, expected {n}")
    if m is None:
        m = dangelo_type_z1(spec).m
    if m < 1:
        raise ValueError("m must be >= 1")
    norm = float(np.sqrt(sum(abs(x) ** 2 for x in eta_prime)))
    if norm > radius:
        raise BoundaryError(f"|eta'| = {norm:g} is outside the normalization radius {radius:g}")

    exact = point_is_exact(eta_prime)
    if exact:
        offset = spec.defining_value_exact(eta_prime)
        if offset != 0:
            raise BoundaryError(f"rho(eta') = {offset} != 0")
    else:
        offset = spec.defining_value(eta_prime)
        if abs(offset) > INEXACT_TOL:
            raise BoundaryError(f"rho(eta') = {offset:g} is not zero")

    steps: List[Step] = []
    translate = _translation_step(eta_prime)
    R = spec.rho.substitute(translate.forward) - offset
    # the constant term of a binary64 translate is rounding noise
    R = Poly({k: c for k, c in R if k.total > 0}, n)
    if any(x != 0 for x in eta_prime):
        steps.append(translate)

    builders = [_gradient_step, _levi_step, lambda P: _harmonic_step(P, m, "harmonic shear")]
    builders += [lambda P, d=d: _alpha_shear_step(P, d) for d in range(1, m + 1)]
    builders.append(lambda P: _harmonic_step(P, m, "closing harmonic shear"))
    for build in builders:
        step = build(R)
        if step is None:
            continue
        logger.debug("normalize %s: %s", spec.label, step.name)
        steps.append(step)
        R = _tidy(R.substitute(step.forward))

    transformed = _tidy(R)
    a_table, b_table = coefficient_tables(transformed, m)
    main = main_part(n, a_table, b_table)
    remainder = _tidy(transformed - main)
    phi, phi_inv = _compose_steps(steps, n)
    return NormalizationResult(
        base_point=eta_prime,
        m=m,
        phi=phi,
        phi_inv=phi_inv,
        a_table=a_table,
        b_table=b_table,
        transformed=transformed,
        main=main,
        remainder=remainder,
        steps=tuple(s.name for s in steps),
        exact=transformed.is_exact and phi.is_exact,
    )


def scaled_base_point(norm: NormalizationResult, scales: Sequence, eta: Sequence) -> Tuple[complex, ...]:
    """Image of the interior point eta under dilation o phi; (0, ..., 0, -1)."""
    image = norm.phi(as_point(eta))
    return tuple(complex(w) / complex(s) for w, s in zip(image, scales))


def normal_form_defect(norm: NormalizationResult) -> float:
    "Largest modulus among forbidden remainder monomials"
    return max((abs(c) for _, _, c in norm.violations()), default=0.0)
