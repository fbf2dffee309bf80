"""Rigid polynomial model domains rho = Re z_n + F(z', zb').

Levi data, the mixed-degree type in the z1 direction and sampled
hypothesis diagnostics.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from .config import HERMITIAN_TOL, PSC_FAIL_TOL, RANK_TOL, SEED, get_degree_cap
from .cpoly import Multidegree, Poly, RealPoly, parse_poly
from .cscalar import ComplexScalar
from .errors import FiniteTypeError, NvarsMismatchError, ParseError
from .schema import DomainFile

logger = logging.getLogger("pscale")


@dataclass(frozen=True)
class DomainSpec:
    n: int
    F: RealPoly
    label: str = ""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("dimension n must be >= 2")
        if self.F.nvars != self.n - 1:
            raise NvarsMismatchError(self.F.nvars, self.n - 1)
        if not isinstance(self.F, RealPoly):
            object.__setattr__(self, "F", RealPoly.of(self.F))
        if self.F.coefficient(Multidegree.zero(self.n - 1)) != 0:
            raise ValueError("F must vanish at the origin")

    @classmethod
    def from_text(cls, F: str, n: int, label: str = "") -> "DomainSpec":
        poly = parse_poly(F, n - 1)
        if not isinstance(poly, RealPoly):
            raise ParseError("F is not real-valued")
        return cls(n, poly, label)

    @classmethod
    def from_json(cls, data) -> "DomainSpec":
        f = DomainFile.from_dict(data)
        return cls.from_text(f.F, f.n, f.label)

    def to_json(self) -> dict:
        return {"n": self.n, "F": self.F.to_expression(), "label": self.label}

    @classmethod
    def egg(cls, m: int, n: int = 3) -> "DomainSpec":
        "E_m: |z1|^(2m) + |z2|^2 + ... + |z_{n-1}|^2"
        parts = [f"abs2(z1)^{m}"] + [f"abs2(z{a})" for a in range(2, n)]
        return cls.from_text(" + ".join(parts), n, f"egg E{m}")

    @classmethod
    def ball_model(cls, n: int = 3) -> "DomainSpec":
        parts = [f"abs2(z{k})" for k in range(1, n)]
        return cls.from_text(" + ".join(parts), n, "ball model")

    @cached_property
    def rho(self) -> RealPoly:
        re_zn = Poly.var(self.n, self.n).real_part()
        return RealPoly.of(re_zn + self.F.lift(self.n))

    def defining_value(self, point: Sequence) -> float:
        return self.rho.evaluate(point).real

    def defining_value_exact(self, point: Sequence):
        value = self.rho.evaluate_exact(point)
        if isinstance(value, ComplexScalar):
            return value.re
        return value.real

    @cached_property
    def levi_entries(self) -> Tuple[Tuple[Poly, ...], ...]:
        "d^2 F / dz_j dzb_k as polynomials"
        m = self.n - 1
        return tuple(
            tuple(self.F.wirtinger(j).wirtinger(k, barred=True) for k in range(1, m + 1))
            for j in range(1, m + 1)
        )


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    required: bool = True
    detail: str = ""


@dataclass(frozen=True)
class NormalFormReport:
    checks: Tuple[ConstraintCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.required)

    @property
    def type_two_at_origin(self) -> bool:
        return not self.check("z1 Levi-degenerate").passed

    def check(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def failed(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.checks if not c.passed)


def validate_normal_form(spec: DomainSpec) -> NormalFormReport:
    F = spec.F
    m = spec.n - 1
    checks = []

    low = [key for key, _ in F if key.total <= 1]
    checks.append(
        ConstraintCheck(
            "no constant or linear terms",
            not low,
            detail=", ".join(Poly({k: F.coefficient(k)}, m).to_expression() for k in low),
        )
    )

    bad_block = []
    for a in range(2, m + 1):
        for b in range(2, m + 1):
            want = 1 if a == b else 0
            if F.coeff({a: 1}, {b: 1}) != want:
                bad_block.append(f"z{a}*zb{b}")
    checks.append(ConstraintCheck("Levi block is identity", not bad_block, detail=", ".join(bad_block)))

    cross = [f"z1*zb{a}" for a in range(2, m + 1) if F.coeff({1: 1}, {a: 1}) != 0]
    checks.append(ConstraintCheck("no z1-z_alpha Levi cross terms", not cross, detail=", ".join(cross)))

    harmonic = [
        key
        for key, _ in F
        if key.involves_only(1) and key.total > 0 and (key.holo[0] == 0 or key.anti[0] == 0)
    ]
    checks.append(
        ConstraintCheck(
            "no harmonic pure-z1 terms",
            not harmonic,
            detail=", ".join(Poly({k: F.coefficient(k)}, m).to_expression() for k in harmonic),
        )
    )

    c11 = F.coeff({1: 1}, {1: 1})
    checks.append(
        ConstraintCheck(
            "z1 Levi-degenerate",
            c11 == 0,
            required=False,
            detail="" if c11 == 0 else f"coefficient of z1*zb1 is {c11}; type 2 at origin",
        )
    )
    return NormalFormReport(tuple(checks))


@dataclass(frozen=True)
class LeviData:
    matrix: np.ndarray = field(repr=False)
    eigenvalues: Tuple[float, ...]
    rank: int
    corank: int

    def __post_init__(self) -> None:
        if not np.allclose(self.matrix, self.matrix.conj().T, atol=HERMITIAN_TOL, rtol=0):
            raise ValueError("Levi matrix is not Hermitian")


def levi_form(spec: DomainSpec, point: Sequence = None, tol: float = RANK_TOL) -> LeviData:
    m = spec.n - 1
    if point is None:
        point = (0,) * m
    if len(point) != m:
        raise NvarsMismatchError(len(point), m)
    matrix = np.array(
        [[entry.evaluate(point) for entry in row] for row in spec.levi_entries], dtype=complex
    ).reshape(m, m)
    # symmetrize away binary64 noise in the evaluation
    matrix = (matrix + matrix.conj().T) / 2
    eigenvalues = tuple(float(x) for x in np.linalg.eigvalsh(matrix))
    rank = sum(1 for x in eigenvalues if abs(x) > tol)
    return LeviData(matrix, eigenvalues, rank, m - rank)


def levi_rank_corank(spec: DomainSpec, point: Sequence = None, tol: float = RANK_TOL) -> Tuple[int, int]:
    if tol <= 0:
        raise ValueError("tol must be positive")
    data = levi_form(spec, point, tol)
    return data.rank, data.corank


@dataclass(frozen=True)
class TypeCertificate:
    value: int
    certified: bool
    notes: Tuple[str, ...] = ()

    def __int__(self) -> int:
        return self.value

    @property
    def m(self) -> int:
        return self.value // 2


def dangelo_type_z1(spec: DomainSpec) -> TypeCertificate:
    """Minimal mixed degree j+k over terms z1^j zb1^k (j, k > 0) of F.

    Equals the type at the origin when the normal-form constraints hold;
    otherwise the value is reported uncertified.
    """
    degrees = [key.total for key, _ in spec.F.project_var(1) if key.holo[0] > 0 and key.anti[0] > 0]
    if not degrees:
        raise FiniteTypeError(
            f"no finite type detected in z1 up to degree cap {get_degree_cap()}"
        )
    value = min(degrees)
    notes = []
    report = validate_normal_form(spec)
    if not report.passed:
        notes.append("normal form fails: " + ", ".join(c for c in report.failed if c != "z1 Levi-degenerate"))
    if value % 2:
        notes.append(f"odd minimal mixed degree {value}; not a valid type")
        logger.warning("odd minimal mixed degree %d for %s", value, spec.label or "domain")
    return TypeCertificate(value, not notes, tuple(notes))


@dataclass(frozen=True)
class PseudoconvexityReport:
    min_eigenvalue: float
    argmin: Tuple[complex, ...]
    samples: int
    radius: float
    tol: float = PSC_FAIL_TOL

    @property
    def passed(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


def boundary_samples(spec: DomainSpec, radius: float, count: int, seed: int = SEED) -> np.ndarray:
    """Random boundary points over the polydisc |z_k| < radius (k < n).

    The first sample is the origin. Columns are z_1..z_n.
    """
    rng = np.random.default_rng(seed)
    m = spec.n - 1
    r = radius * np.sqrt(rng.uniform(0, 1, size=(count, m)))
    theta = rng.uniform(0, 2 * np.pi, size=(count, m))
    zp = r * np.exp(1j * theta)
    zp[0] = 0
    f = spec.F.evaluate_many(zp).real
    zn = -f + 1j * rng.uniform(-radius, radius, size=count)
    zn[0] = 0
    return np.column_stack([zp, zn])


def pseudoconvexity_sample(
    spec: DomainSpec, radius: float = 0.5, count: int = 1000, seed: int = SEED
) -> PseudoconvexityReport:
    """Sampled minimum of the Levi form on the complex tangent space.

    For rigid rho the restriction to the tangent space is the complex
    Hessian of F in z'.
    """
    if radius <= 0 or count < 1:
        raise ValueError("radius must be positive and count >= 1")
    points = boundary_samples(spec, radius, count, seed)
    zp = points[:, : spec.n - 1]
    m = spec.n - 1
    hess = np.empty((count, m, m), dtype=complex)
    for j, row in enumerate(spec.levi_entries):
        for k, entry in enumerate(row):
            hess[:, j, k] = entry.evaluate_many(zp)
    hess = (hess + np.conj(np.swapaxes(hess, 1, 2))) / 2
    lowest = np.linalg.eigvalsh(hess)[:, 0]
    i = int(np.argmin(lowest))
    report = PseudoconvexityReport(
        float(lowest[i]), tuple(complex(x) for x in points[i]), count, radius
    )
    if not report.passed:
        logger.warning(
            "Levi form negative (%g) at sampled boundary point of %s", report.min_eigenvalue, spec.label
        )
    return report


def strongly_pseudoconvex_at_origin(spec: DomainSpec, tol: float = RANK_TOL) -> bool:
    data = levi_form(spec, None, tol)
    return data.corank == 0 and min(data.eigenvalues) > tol
