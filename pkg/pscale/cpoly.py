"""Sparse exact polynomials in z_1..z_n and their conjugates.

Terms are keyed by a Multidegree (holomorphic exponents, antiholomorphic
exponents) and kept in graded lexicographic order. Coefficients are either
exact ComplexScalars or binary64 complex numbers; zero coefficients are
never stored.
"""
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .config import HERMITIAN_TOL, get_degree_cap
from .cscalar import ONE, ZERO, Coefficient, ComplexScalar
from .errors import DegreeCapError, HolomorphyError, NvarsMismatchError, VariableIndexError


class Multidegree(NamedTuple):
    holo: Tuple[int, ...]
    anti: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.holo) + sum(self.anti)

    @property
    def nvars(self) -> int:
        return len(self.holo)

    def conjugate(self) -> "Multidegree":
        return Multidegree(self.anti, self.holo)

    def sort_key(self):
        return (self.total, self.holo, self.anti)

    def __add__(self, other: "Multidegree") -> "Multidegree":
        return Multidegree(
            tuple(a + b for a, b in zip(self.holo, other.holo)),
            tuple(a + b for a, b in zip(self.anti, other.anti)),
        )

    def involves_only(self, var: int) -> bool:
        "True when only z_var / zb_var (1-based) carry nonzero exponents"
        k = var - 1
        return all(
            e == 0 for i, e in enumerate(self.holo + self.anti) if i % len(self.holo) != k
        )

    @staticmethod
    def zero(nvars: int) -> "Multidegree":
        return Multidegree((0,) * nvars, (0,) * nvars)

    @staticmethod
    def of(nvars: int, holo: Mapping[int, int] = None, anti: Mapping[int, int] = None) -> "Multidegree":
        "Build from sparse 1-based exponent maps, e.g. of(3, {1: 2}, {1: 1})"
        h = [0] * nvars
        a = [0] * nvars
        for k, e in (holo or {}).items():
            h[k - 1] = e
        for k, e in (anti or {}).items():
            a[k - 1] = e
        return Multidegree(tuple(h), tuple(a))


Scalar = Union[ComplexScalar, complex, int, Fraction, float]


def _is_zero(c) -> bool:
    return c == 0


class Poly:
    """Immutable sparse polynomial in nvars complex variables and conjugates."""

    __slots__ = ("_terms", "nvars", "_hash")

    def __init__(self, terms: Mapping = None, nvars: int = 1) -> None:
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        self.nvars = nvars
        acc: Dict[Multidegree, Coefficient] = {}
        for key, coeff in (terms or {}).items():
            key = Multidegree(tuple(key[0]), tuple(key[1]))
            if key.nvars != nvars or len(key.anti) != nvars:
                raise NvarsMismatchError(key.nvars, nvars)
            if any(e < 0 for e in key.holo + key.anti):
                raise ValueError(f"negative exponent in {key}")
            coeff = ComplexScalar.coerce(coeff)
            if key in acc:
                coeff = acc[key] + coeff
            acc[key] = coeff
        ordered = sorted(
            ((k, c) for k, c in acc.items() if not _is_zero(c)),
            key=lambda kc: kc[0].sort_key(),
        )
        self._terms = dict(ordered)
        self._hash = None
        cap = get_degree_cap()
        if self._terms and self.degree > cap:
            raise DegreeCapError(self.degree, cap)

    # construction

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c: Scalar, nvars: int) -> "Poly":
        return cls({Multidegree.zero(nvars): c}, nvars)

    @classmethod
    def var(cls, k: int, nvars: int, barred: bool = False) -> "Poly":
        if not 1 <= k <= nvars:
            raise VariableIndexError(f"variable index {k} out of range 1..{nvars}")
        if barred:
            return cls({Multidegree.of(nvars, anti={k: 1}): ONE}, nvars)
        return cls({Multidegree.of(nvars, holo={k: 1}): ONE}, nvars)

    @classmethod
    def monomial(cls, nvars: int, holo=None, anti=None, coeff: Scalar = 1) -> "Poly":
        return cls({Multidegree.of(nvars, holo, anti): coeff}, nvars)

    # container protocol

    @property
    def terms(self) -> Mapping[Multidegree, Coefficient]:
        return MappingProxyType(self._terms)

    def __iter__(self) -> Iterator[Tuple[Multidegree, Coefficient]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, key: Multidegree) -> Coefficient:
        return self._terms.get(key, ZERO)

    def coeff(self, holo=None, anti=None) -> Coefficient:
        "Coefficient lookup with sparse 1-based exponent maps"
        return self.coefficient(Multidegree.of(self.nvars, holo, anti))

    @property
    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(k.total for k in self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, ComplexScalar) for c in self._terms.values())

    @property
    def is_holomorphic(self) -> bool:
        return all(not any(k.anti) for k in self._terms)

    @property
    def is_homogeneous(self) -> bool:
        return len({k.total for k in self._terms}) <= 1

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        exact = self.is_exact
        for key, c in self._terms.items():
            partner = self._terms.get(key.conjugate(), ZERO)
            if exact and isinstance(partner, ComplexScalar):
                if c != partner.conjugate():
                    return False
            elif abs(complex(c) - complex(partner).conjugate()) > tol * max(1.0, abs(c)):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_expression()!r}, nvars={self.nvars})"

    # arithmetic

    def _check(self, other: "Poly") -> None:
        if self.nvars != other.nvars:
            raise NvarsMismatchError(self.nvars, other.nvars)

    def _coerce(self, other) -> Optional["Poly"]:
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (ComplexScalar, int, Fraction, float, complex)):
            return Poly.constant(other, self.nvars)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return Poly(terms, self.nvars)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({k: -c for k, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (ComplexScalar, int, Fraction, float, complex)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        terms: Dict[Multidegree, Coefficient] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                c = c1 * c2
                terms[k] = terms[k] + c if k in terms else c
        return Poly(terms, self.nvars)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Poly":
        c = ComplexScalar.coerce(c)
        return Poly({k: v * c for k, v in self._terms.items()}, self.nvars)

    def __truediv__(self, c):
        if isinstance(c, Poly):
            return NotImplemented
        c = ComplexScalar.coerce(c)
        return self.scale(ONE / c if isinstance(c, ComplexScalar) else 1 / c)

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.constant(ONE, self.nvars)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def conjugate(self) -> "Poly":
        return Poly({k.conjugate(): c.conjugate() for k, c in self._terms.items()}, self.nvars)

    def real_part(self) -> "RealPoly":
        "Re(P) = (P + conj P) / 2"
        return RealPoly.of((self + self.conjugate()).scale(Fraction(1, 2)))

    def imag_part(self) -> "RealPoly":
        "Im(P) = (P - conj P) / 2i"
        return RealPoly.of((self - self.conjugate()).scale(ComplexScalar(0, Fraction(-1, 2))))

    def abs2(self) -> "RealPoly":
        return RealPoly.of(self * self.conjugate())

    def to_numeric(self) -> "Poly":
        return Poly({k: complex(c) for k, c in self._terms.items()}, self.nvars)

    def chop(self, tol: float) -> "Poly":
        "Drop binary64 coefficients with modulus <= tol (exact ones are kept)"
        return Poly(
            {k: c for k, c in self._terms.items() if isinstance(c, ComplexScalar) or abs(c) > tol},
            self.nvars,
        )

    # calculus

    def wirtinger(self, var: int, barred: bool = False) -> "Poly":
        if not 1 <= var <= self.nvars:
            raise VariableIndexError(f"variable index {var} out of range 1..{self.nvars}")
        k = var - 1
        terms = {}
        for key, c in self._terms.items():
            exps = key.anti if barred else key.holo
            e = exps[k]
            if e == 0:
                continue
            lowered = exps[:k] + (e - 1,) + exps[k + 1 :]
            new_key = Multidegree(key.holo, lowered) if barred else Multidegree(lowered, key.anti)
            terms[new_key] = c * e
        return Poly(terms, self.nvars)

    # substitution / evaluation

    def substitute(self, phi: "HoloMap") -> "Poly":
        """z_k -> phi_k, zb_k -> conj(phi_k)."""
        if phi.nvars_in != self.nvars:
            raise NvarsMismatchError(self.nvars, phi.nvars_in)
        out_n = phi.nvars_out
        holo_pows = [[Poly.constant(ONE, out_n), comp] for comp in phi.components]
        anti_pows = [[Poly.constant(ONE, out_n), comp.conjugate()] for comp in phi.components]

        def power(table, k, e):
            while len(table[k]) <= e:
                table[k].append(table[k][-1] * table[k][1])
            return table[k][e]

        result = Poly.zero(out_n)
        for key, c in self._terms.items():
            term = Poly.constant(c, out_n)
            for k in range(self.nvars):
                if key.holo[k]:
                    term = term * power(holo_pows, k, key.holo[k])
                if key.anti[k]:
                    term = term * power(anti_pows, k, key.anti[k])
            result = result + term
        return result

    def evaluate(self, point: Sequence) -> complex:
        if len(point) != self.nvars:
            raise NvarsMismatchError(len(point), self.nvars)
        z = [complex(x) for x in point]
        zb = [x.conjugate() for x in z]
        total = 0j
        for key, c in self._terms.items():
            v = complex(c)
            for k in range(self.nvars):
                if key.holo[k]:
                    v *= z[k] ** key.holo[k]
                if key.anti[k]:
                    v *= zb[k] ** key.anti[k]
            total += v
        return total

    def evaluate_exact(self, point: Sequence) -> Coefficient:
        if len(point) != self.nvars:
            raise NvarsMismatchError(len(point), self.nvars)
        z = [ComplexScalar.coerce(x) for x in point]
        zb = [x.conjugate() for x in z]
        total = ZERO
        for key, c in self._terms.items():
            v = c
            for k in range(self.nvars):
                if key.holo[k]:
                    v = v * z[k] ** key.holo[k]
                if key.anti[k]:
                    v = v * zb[k] ** key.anti[k]
            total = total + v
        return total

    def evaluate_many(self, points) -> np.ndarray:
        """Vectorized binary64 evaluation; points has shape (N, nvars)."""
        pts = np.asarray(points, dtype=complex).reshape(-1, self.nvars)
        conj = pts.conj()
        out = np.zeros(pts.shape[0], dtype=complex)
        for key, c in self._terms.items():
            v = np.full(pts.shape[0], complex(c))
            for k in range(self.nvars):
                if key.holo[k]:
                    v = v * pts[:, k] ** key.holo[k]
                if key.anti[k]:
                    v = v * conj[:, k] ** key.anti[k]
            out += v
        return out

    # structure

    def homogeneous_part(self, d: int, var: Optional[int] = None) -> "Poly":
        if d < 0:
            raise ValueError("degree must be nonnegative")
        return Poly(
            {
                k: c
                for k, c in self._terms.items()
                if k.total == d and (var is None or k.involves_only(var))
            },
            self.nvars,
        )

    def homogeneous_components(self) -> Dict[int, "Poly"]:
        degrees = sorted({k.total for k in self._terms})
        return {d: self.homogeneous_part(d) for d in degrees}

    def lift(self, nvars: int) -> "Poly":
        "Embed into nvars >= self.nvars variables; the new ones come last"
        if nvars < self.nvars:
            raise NvarsMismatchError(self.nvars, nvars)
        pad = (0,) * (nvars - self.nvars)
        return Poly(
            {Multidegree(k.holo + pad, k.anti + pad): c for k, c in self._terms.items()},
            nvars,
        )

    def project_var(self, var: int) -> "Poly":
        "Terms involving only z_var, zb_var, re-expressed in one variable"
        k = var - 1
        return Poly(
            {
                Multidegree((key.holo[k],), (key.anti[k],)): c
                for key, c in self._terms.items()
                if key.involves_only(var)
            },
            1,
        )

    def to_expression(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for key, c in self._terms.items():
            factors = []
            for k, e in enumerate(key.holo, start=1):
                if e:
                    factors.append(f"z{k}" if e == 1 else f"z{k}^{e}")
            for k, e in enumerate(key.anti, start=1):
                if e:
                    factors.append(f"zb{k}" if e == 1 else f"zb{k}^{e}")
            coeff = format_coefficient(c)
            if not factors:
                parts.append(coeff)
            elif coeff == "1":
                parts.append("*".join(factors))
            else:
                parts.append("*".join([coeff] + factors))
        return " + ".join(parts)


def _format_real(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def format_coefficient(c) -> str:
    if isinstance(c, ComplexScalar):
        if c.im == 0:
            return str(c.re) if c.re >= 0 else f"({c.re})"
        if c.re == 0:
            return f"({c.im}*i)"
        sign = "-" if c.im < 0 else "+"
        return f"({c.re} {sign} {abs(c.im)}*i)"
    c = complex(c)
    if c.imag == 0:
        return _format_real(c.real) if c.real >= 0 else f"({_format_real(c.real)})"
    sign = "-" if c.imag < 0 else "+"
    return f"({_format_real(c.real)} {sign} {_format_real(abs(c.imag))}*i)"


class RealPoly(Poly):
    """A Poly with Hermitian coefficient symmetry, i.e. real-valued on C^n."""

    __slots__ = ()

    def __init__(self, terms: Mapping = None, nvars: int = 1, tol: float = HERMITIAN_TOL) -> None:
        super().__init__(terms, nvars)
        if not self.is_hermitian(tol):
            raise ValueError("polynomial is not real-valued (Hermitian symmetry fails)")

    @classmethod
    def of(cls, poly: Poly, tol: float = HERMITIAN_TOL) -> "RealPoly":
        if isinstance(poly, RealPoly):
            return poly
        return cls(dict(poly.terms), poly.nvars, tol)


class HoloMap:
    """A polynomial map w -> z with holomorphic components."""

    __slots__ = ("components", "nvars_in", "nvars_out")

    def __init__(self, components: Sequence[Poly], nvars_out: Optional[int] = None) -> None:
        components = tuple(components)
        if nvars_out is None:
            nvars_out = components[0].nvars if components else 0
        for comp in components:
            if comp.nvars != nvars_out:
                raise NvarsMismatchError(comp.nvars, nvars_out)
        require_holomorphic(components)
        self.components = components
        self.nvars_in = len(components)
        self.nvars_out = nvars_out

    @classmethod
    def identity(cls, n: int) -> "HoloMap":
        return cls([Poly.var(k, n) for k in range(1, n + 1)], n)

    @classmethod
    def translation(cls, shift: Sequence) -> "HoloMap":
        n = len(shift)
        return cls([Poly.var(k, n) + shift[k - 1] for k in range(1, n + 1)], n)

    @classmethod
    def linear(cls, matrix: Sequence[Sequence]) -> "HoloMap":
        "z_k = sum_l matrix[k][l] * w_l"
        n = len(matrix)
        comps = []
        for row in matrix:
            comps.append(Poly({Multidegree.of(n, {l + 1: 1}): c for l, c in enumerate(row)}, n))
        return cls(comps, n)

    @classmethod
    def diagonal(cls, scales: Sequence) -> "HoloMap":
        n = len(scales)
        return cls([Poly.var(k, n) * scales[k - 1] for k in range(1, n + 1)], n)

    def compose(self, inner: "HoloMap") -> "HoloMap":
        "(self o inner)(w) = self(inner(w))"
        return HoloMap([c.substitute(inner) for c in self.components], inner.nvars_out)

    def __call__(self, point: Sequence) -> Tuple:
        if all(isinstance(x, (ComplexScalar, int, Fraction)) for x in point) and all(
            c.is_exact for c in self.components
        ):
            return tuple(c.evaluate_exact(point) for c in self.components)
        return tuple(c.evaluate(point) for c in self.components)

    def evaluate(self, point: Sequence) -> Tuple[complex, ...]:
        return tuple(c.evaluate(point) for c in self.components)

    @property
    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.components)

    @property
    def degree(self) -> int:
        return max((c.degree for c in self.components), default=-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, HoloMap):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def to_expressions(self) -> Tuple[str, ...]:
        return tuple(c.to_expression() for c in self.components)

    def __repr__(self) -> str:
        return f"HoloMap({list(self.to_expressions())})"


# Module-level operations


def poly_arith(kind: str, a: Poly, b) -> Poly:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        if isinstance(b, Poly):
            a._check(b)
        return a * b
    if kind == "scale":
        if isinstance(b, Poly):
            raise TypeError("scale takes a scalar")
        return a.scale(b)
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def conjugate(p: Poly) -> Poly:
    out = p.conjugate()
    return RealPoly.of(out) if isinstance(p, RealPoly) else out


def wirtinger(p: Poly, var: int, barred: bool = False) -> Poly:
    return p.wirtinger(var, barred)


def laplacian_z1(p: Poly) -> Poly:
    "d^2 P / dz1 dzb1; a positive multiple (1/4) of the Laplacian in z1"
    return p.wirtinger(1, barred=False).wirtinger(1, barred=True)


def substitute(p: Poly, phi: HoloMap) -> Poly:
    out = p.substitute(phi)
    if isinstance(p, RealPoly):
        return RealPoly.of(out, tol=max(HERMITIAN_TOL, 1e-9))
    return out


def evaluate(p: Poly, point: Sequence) -> complex:
    return p.evaluate(point)


def homogeneous_part(p: Poly, d: int, var_restricted: Optional[int] = None) -> Poly:
    return p.homogeneous_part(d, var_restricted)


def parse_poly(text: str, nvars: int) -> Poly:
    """Parse an expression in z1..zn, zb1..zbn into a Poly.

    Returns a RealPoly when the result is real-valued.
    """
    from .builder import build_poly
    from .expr import parse

    poly = build_poly(parse(text, nvars), nvars)
    if poly.is_hermitian():
        return RealPoly.of(poly)
    return poly


def require_holomorphic(polys: Iterable[Poly]) -> None:
    for p in polys:
        if not p.is_holomorphic:
            raise HolomorphyError(f"{p.to_expression()} is not holomorphic")
