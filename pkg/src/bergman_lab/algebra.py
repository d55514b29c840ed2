"""Sparse multivariate polynomials and rational functions over complex numbers.

A :class:`Polynomial` stores a map from exponent tuples to complex
coefficients.  Arithmetic is exact up to double rounding; coefficients whose
magnitude falls below ``PRUNE_RTOL`` times the largest coefficient are dropped
so that the representation stays canonical.

Rational functions are kept unreduced (there is no multivariate gcd here);
equality is decided by cross-multiplication.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

PRUNE_RTOL = 1e-13
POLE_TOL = 1e-14


class DimensionMismatch(ValueError):
    pass


class PoleEvaluation(ZeroDivisionError):
    pass


class NotSymmetric(ValueError):
    pass


def grlex_key(alpha: tuple[int, ...]):
    """Graded lexicographic key: total degree first, then z_1 before z_2."""
    return (sum(alpha), tuple(-a for a in alpha))


def _as_points(z, dim: int):
    """Coerce input to an (N, dim) complex array; report whether it was a single point."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 0:
        if dim != 1:
            raise DimensionMismatch(f"scalar input for a {dim}-variable function")
        return arr.reshape(1, 1), True
    if arr.ndim == 1:
        if dim == 1:
            return arr.reshape(-1, 1), False
        if arr.shape[0] != dim:
            raise DimensionMismatch(f"expected {dim} coordinates, got {arr.shape[0]}")
        return arr.reshape(1, dim), True
    if arr.ndim == 2 and arr.shape[1] == dim:
        return arr, False
    raise DimensionMismatch(f"cannot read points of shape {arr.shape} in dimension {dim}")


class Polynomial:
    """Polynomial in ``dim`` complex variables with sparse complex coefficients."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple[int, ...], complex] | None = None,
                 prune: bool = True):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        cleaned: dict[tuple[int, ...], complex] = {}
        if terms:
            for alpha, c in terms.items():
                alpha = tuple(int(a) for a in alpha)
                if len(alpha) != dim:
                    raise DimensionMismatch(f"multi-index {alpha} in dimension {dim}")
                if any(a < 0 for a in alpha):
                    raise ValueError(f"negative exponent in {alpha}")
                c = complex(c)
                if c != 0:
                    cleaned[alpha] = cleaned.get(alpha, 0) + c
        if cleaned and prune:
            cutoff = PRUNE_RTOL * max(abs(c) for c in cleaned.values())
            cleaned = {a: c for a, c in cleaned.items() if abs(c) > cutoff}
        self.terms = cleaned
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, dim: int, c: complex = 1.0) -> "Polynomial":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim)

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        alpha = [0] * dim
        alpha[i] = 1
        return cls(dim, {tuple(alpha): 1.0})

    @classmethod
    def monomial(cls, dim: int, alpha: Sequence[int], c: complex = 1.0) -> "Polynomial":
        return cls(dim, {tuple(alpha): c})

    @classmethod
    def variables(cls, dim: int) -> list["Polynomial"]:
        return [cls.variable(dim, i) for i in range(dim)]

    # basic properties
    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(a) for a in self.terms)

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(a[i] for a in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(a) == 0 for a in self.terms)

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return self.terms.get(tuple(alpha), 0j)

    def constant_term(self) -> complex:
        return self.terms.get((0,) * self.dim, 0j)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], complex]]:
        return sorted(self.terms.items(), key=lambda item: grlex_key(item[0]))

    def homogeneous_part(self, k: int) -> "Polynomial":
        return Polynomial(self.dim, {a: c for a, c in self.terms.items() if sum(a) == k})

    def weighted_degree(self, weights: Sequence[int]) -> int:
        if not self.terms:
            return -1
        return max(sum(w * a for w, a in zip(weights, alpha)) for alpha in self.terms)

    def __repr__(self) -> str:
        if not self.terms:
            return f"Polynomial({self.dim}, 0)"
        parts = []
        for alpha, c in self.sorted_terms():
            mono = "*".join(f"z{i + 1}^{a}" if a > 1 else f"z{i + 1}"
                            for i, a in enumerate(alpha) if a)
            parts.append(f"({c:.6g})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # comparisons
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float, complex)):
            other = Polynomial.constant(self.dim, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def isclose(self, other: "Polynomial", atol: float = 1e-12) -> bool:
        """Coefficientwise agreement up to ``atol`` times the larger coefficient scale."""
        diff = self - other
        scale = max(1.0, self.max_abs(), other.max_abs())
        return diff.max_abs() <= atol * scale

    # arithmetic
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise DimensionMismatch(f"dimensions {self.dim} and {other.dim}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return Polynomial.constant(self.dim, complex(other))
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) + other
        other = self._coerce(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return Polynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.dim, {a: -c for a, c in self.terms.items()}, prune=False)

    def __sub__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) - other
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, RationalFunction):
            return RationalFunction(self) * other
        if isinstance(other, (int, float, complex, np.number)):
            c = complex(other)
            return Polynomial(self.dim, {a: c * v for a, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[tuple[int, ...], complex] = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + ca * cb
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * (1 / complex(other))
        return RationalFunction(self) / other

    def __rtruediv__(self, other):
        return RationalFunction(self._coerce(other)) / self

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative powers are rational; divide explicitly")
        result = Polynomial.constant(self.dim)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # calculus
    def partial(self, i: int) -> "Polynomial":
        if not 0 <= i < self.dim:
            raise IndexError(f"variable index {i} out of range for dimension {self.dim}")
        out = {}
        for a, c in self.terms.items():
            if a[i]:
                b = list(a)
                b[i] -= 1
                out[tuple(b)] = c * a[i]
        return Polynomial(self.dim, out)

    # evaluation
    def __call__(self, z):
        pts, single = _as_points(z, self.dim)
        vals = self._eval_points(pts)
        return vals[0] if single else vals

    def _eval_points(self, pts: np.ndarray) -> np.ndarray:
        n = pts.shape[0]
        if not self.terms:
            return np.zeros(n, dtype=complex)
        maxdeg = [self.degree_in(i) for i in range(self.dim)]
        powers = []
        for i in range(self.dim):
            table = np.ones((maxdeg[i] + 1, n), dtype=complex)
            for k in range(1, maxdeg[i] + 1):
                table[k] = table[k - 1] * pts[:, i]
            powers.append(table)
        out = np.zeros(n, dtype=complex)
        for alpha, c in self.terms.items():
            term = np.full(n, c, dtype=complex)
            for i, a in enumerate(alpha):
                if a:
                    term = term * powers[i][a]
            out += term
        return out

    # substitution
    def substitute(self, polys: Sequence["Polynomial"]) -> "Polynomial":
        """Polynomial composition ``self(polys[0], ..., polys[d-1])``."""
        if len(polys) != self.dim:
            raise DimensionMismatch(f"{self.dim} variables but {len(polys)} substitutions")
        if not self.terms:
            tgt = polys[0].dim if polys else 1
            return Polynomial.zero(tgt)
        target_dim = polys[0].dim
        if any(p.dim != target_dim for p in polys):
            raise DimensionMismatch("substituted polynomials live in different dimensions")
        cache: list[dict[int, Polynomial]] = [{0: Polynomial.constant(target_dim)} for _ in polys]

        def power(i: int, k: int) -> Polynomial:
            table = cache[i]
            if k not in table:
                table[k] = power(i, k - 1) * polys[i]
            return table[k]

        out = Polynomial.zero(target_dim)
        acc: dict[tuple[int, ...], complex] = {}
        for alpha, c in self.terms.items():
            term = reduce(lambda p, q: p * q, (power(i, a) for i, a in enumerate(alpha) if a),
                          Polynomial.constant(target_dim))
            for b, v in term.terms.items():
                acc[b] = acc.get(b, 0) + c * v
        out = Polynomial(target_dim, acc)
        return out

    def linear_substitute(self, matrix) -> "Polynomial":
        """Return ``z -> self(matrix @ z)``."""
        mat = np.asarray(matrix, dtype=complex)
        if mat.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"matrix of shape {mat.shape} for dimension {self.dim}")
        nonzero = [np.flatnonzero(mat[i]) for i in range(self.dim)]
        if all(len(nz) == 1 for nz in nonzero):
            # monomial matrix: each coordinate becomes a scaled single variable
            cols = [int(nz[0]) for nz in nonzero]
            scales = [mat[i, cols[i]] for i in range(self.dim)]
            out: dict[tuple[int, ...], complex] = {}
            for alpha, c in self.terms.items():
                beta = [0] * self.dim
                coef = c
                for i, a in enumerate(alpha):
                    if a:
                        beta[cols[i]] += a
                        coef *= scales[i] ** a
                key = tuple(beta)
                out[key] = out.get(key, 0) + coef
            return Polynomial(self.dim, out)
        forms = [Polynomial(self.dim, {tuple(int(j == k) for j in range(self.dim)): mat[i, k]
                                       for k in range(self.dim)}) for i in range(self.dim)]
        return self.substitute(forms)

    # serialization
    def to_json(self) -> dict:
        return {"dim": self.dim,
                "terms": [{"alpha": list(a), "re": c.real, "im": c.imag}
                          for a, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        return cls(int(data["dim"]),
                   {tuple(t["alpha"]): complex(t["re"], t["im"]) for t in data["terms"]})


class RationalFunction:
    """Quotient of two polynomials, kept unreduced."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: Polynomial, denominator: Polynomial | None = None):
        if denominator is None:
            denominator = Polynomial.constant(numerator.dim)
        if numerator.dim != denominator.dim:
            raise DimensionMismatch("numerator and denominator dimensions differ")
        if denominator.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.numerator = numerator
        self.denominator = denominator

    @property
    def dim(self) -> int:
        return self.numerator.dim

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.is_polynomial():
            raise ValueError("denominator is not constant")
        return self.numerator * (1 / self.denominator.constant_term())

    def __repr__(self) -> str:
        return f"({self.numerator}) / ({self.denominator})"

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, float, complex, np.number)):
            return RationalFunction(Polynomial.constant(self.dim, complex(other)))
        raise TypeError(f"cannot combine RationalFunction with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        if self.denominator == other.denominator:
            return RationalFunction(self.numerator + other.numerator, self.denominator)
        return RationalFunction(self.numerator * other.denominator
                                + other.numerator * self.denominator,
                                self.denominator * other.denominator)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.numerator * other.numerator,
                                self.denominator * other.denominator)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.numerator.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(self.numerator * other.denominator,
                                self.denominator * other.numerator)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return RationalFunction(self.denominator ** (-n), self.numerator ** (-n))
        return RationalFunction(self.numerator ** n, self.denominator ** n)

    def __eq__(self, other) -> bool:
        if isinstance(other, (Polynomial, int, float, complex)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        lhs = self.numerator * other.denominator
        rhs = other.numerator * self.denominator
        scale = max(1.0, lhs.max_abs(), rhs.max_abs())
        return (lhs - rhs).max_abs() <= 1e-12 * scale

    __hash__ = None

    def partial(self, i: int) -> "RationalFunction":
        n, q = self.numerator, self.denominator
        if q.is_constant():
            return RationalFunction(n.partial(i), q)
        return RationalFunction(n.partial(i) * q - n * q.partial(i), q * q)

    def __call__(self, z):
        pts, single = _as_points(z, self.dim)
        num = self.numerator._eval_points(pts)
        den = self.denominator._eval_points(pts)
        if np.any(np.abs(den) <= POLE_TOL):
            raise PoleEvaluation("denominator vanishes at an evaluation point")
        vals = num / den
        return vals[0] if single else vals


Function = Polynomial | RationalFunction


def eval(f: Function, z):  # noqa: A001 - mirrors the mathematical name
    """Evaluate a polynomial or rational function at a point or an (N, d) batch."""
    return f(z)


def partial(f: Function, i: int) -> Function:
    """Formal complex partial derivative with respect to ``z_i`` (0-based)."""
    return f.partial(i)


def compose(f: Function, g: Sequence[Function | complex]) -> RationalFunction:
    """Substitute ``g`` into ``f``; the result lives in the common source of ``g``.

    The denominator is a product of powers of the denominators of the ``g_i``.
    """
    if f.dim != len(g):
        raise DimensionMismatch(f"f has {f.dim} variables but {len(g)} substitutions")
    dims = {gi.dim for gi in g if isinstance(gi, (Polynomial, RationalFunction))}
    if len(dims) > 1:
        raise DimensionMismatch("substitutions do not share a source dimension")
    src = dims.pop() if dims else 1
    parts = []
    for gi in g:
        if isinstance(gi, RationalFunction):
            parts.append(gi)
        elif isinstance(gi, Polynomial):
            parts.append(RationalFunction(gi))
        else:
            parts.append(RationalFunction(Polynomial.constant(src, complex(gi))))
    if isinstance(f, RationalFunction):
        num_poly, den_poly = f.numerator, f.denominator
    else:
        num_poly, den_poly = f, None
    degs = [max(num_poly.degree_in(i), den_poly.degree_in(i) if den_poly is not None else 0, 0)
            for i in range(f.dim)]

    def substitute(p: Polynomial) -> Polynomial:
        nums = [gi.numerator for gi in parts]
        dens = [gi.denominator for gi in parts]
        num_cache = [{0: Polynomial.constant(src)} for _ in parts]
        den_cache = [{0: Polynomial.constant(src)} for _ in parts]

        def pw(cache, base, k):
            if k not in cache:
                cache[k] = pw(cache, base, k - 1) * base
            return cache[k]

        acc: dict[tuple[int, ...], complex] = {}
        for alpha, c in p.terms.items():
            term = Polynomial.constant(src, c)
            for i, a in enumerate(alpha):
                if a:
                    term = term * pw(num_cache[i], nums[i], a)
                if degs[i] - a and not dens[i].is_constant():
                    term = term * pw(den_cache[i], dens[i], degs[i] - a)
                elif degs[i] - a:
                    term = term * (dens[i].constant_term() ** (degs[i] - a))
            for b, v in term.terms.items():
                acc[b] = acc.get(b, 0) + v
        return Polynomial(src, acc)

    common = Polynomial.constant(src)
    for gi, k in zip(parts, degs):
        if k:
            common = common * (gi.denominator ** k)
    num = substitute(num_poly)
    if den_poly is None:
        return RationalFunction(num, common)
    return RationalFunction(num, substitute(den_poly))


def jacobian_det(g: Sequence[Function]) -> RationalFunction:
    """Determinant of the matrix (d g_i / d z_j), row i = component i."""
    d = len(g)
    if d == 0:
        raise DimensionMismatch("empty map")
    parts = [gi if isinstance(gi, RationalFunction) else RationalFunction(gi) for gi in g]
    if any(p.dim != d for p in parts):
        raise DimensionMismatch("jacobian needs d components in d variables")
    if all(p.is_polynomial() for p in parts):
        polys = [p.as_polynomial() for p in parts]
        entries = [[polys[i].partial(j) for j in range(d)] for i in range(d)]
        total = Polynomial.zero(d)
        for perm in itertools.permutations(range(d)):
            term = Polynomial.constant(d, _perm_sign(perm))
            for i, j in enumerate(perm):
                term = term * entries[i][j]
                if term.is_zero():
                    break
            total = total + term
        return RationalFunction(total)
    entries = [[parts[i].partial(j) for j in range(d)] for i in range(d)]
    total = None
    for perm in itertools.permutations(range(d)):
        factors = [entries[i][j] for i, j in enumerate(perm)]
        if any(f.numerator.is_zero() for f in factors):
            continue
        term = reduce(lambda a, b: a * b, factors) * _perm_sign(perm)
        total = term if total is None else total + term
    if total is None:
        return RationalFunction(Polynomial.zero(d))
    return total


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


perm_sign = _perm_sign


# symmetric polynomials

def elementary_symmetric(d: int, k: int) -> Polynomial:
    """Sum of all products of ``k`` distinct variables among ``d``."""
    if k == 0:
        return Polynomial.constant(d)
    terms = {}
    for idx in itertools.combinations(range(d), k):
        terms[tuple(int(i in idx) for i in range(d))] = 1.0
    return Polynomial(d, terms)


def vandermonde(d: int) -> Polynomial:
    """prod_{i<j} (z_i - z_j)."""
    z = Polynomial.variables(d)
    out = Polynomial.constant(d)
    for i, j in itertools.combinations(range(d), 2):
        out = out * (z[i] - z[j])
    return out


def alternant(exponents: Sequence[int]) -> Polynomial:
    """sum over permutations sigma of sgn(sigma) z^{sigma(exponents)}."""
    d = len(exponents)
    terms: dict[tuple[int, ...], complex] = {}
    for perm in itertools.permutations(range(d)):
        alpha = [0] * d
        for i, j in enumerate(perm):
            alpha[j] = exponents[i]
        key = tuple(alpha)
        terms[key] = terms.get(key, 0) + _perm_sign(perm)
    return Polynomial(d, terms)


def weighted_compositions(d: int, total: int, weights: Sequence[int]) -> list[tuple[int, ...]]:
    """All beta in Z_+^d with sum(weights[i] * beta[i]) == total."""
    out = []

    def rec(i, remaining, prefix):
        if i == d:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        for b in range(remaining // weights[i] + 1):
            rec(i + 1, remaining - b * weights[i], prefix + [b])

    rec(0, total, [])
    return out


_ELEMENTARY_POWERS: dict[tuple[int, tuple[int, ...]], Polynomial] = {}


def _elementary_monomial(d: int, beta: tuple[int, ...]) -> Polynomial:
    key = (d, beta)
    if key not in _ELEMENTARY_POWERS:
        out = Polynomial.constant(d)
        for k, b in enumerate(beta, start=1):
            if b:
                out = out * elementary_symmetric(d, k) ** b
        _ELEMENTARY_POWERS[key] = out
    return _ELEMENTARY_POWERS[key]


def express_in_elementary(p: Polynomial, tol: float = 1e-9) -> Polynomial:
    """Find h with h(s_1, ..., s_d) = p for a symmetric polynomial p.

    Classical leading-term reduction: while p is nonzero, take its
    lexicographically largest monomial z^alpha (a partition when p is
    symmetric) and subtract c * s_1^(a1-a2) ... s_d^(ad).  The products of
    elementary polynomials have integer coefficients, so the reduction is
    exact up to rounding.  Raises NotSymmetric when a significant leading
    exponent is not non-increasing.
    """
    d = p.dim
    scale = max(1.0, p.max_abs())
    out: dict[tuple[int, ...], complex] = {}
    rest = dict(p.terms)
    floor = 1e-13 * scale
    while rest:
        alpha = max(rest)
        c = rest[alpha]
        if abs(c) <= floor:
            del rest[alpha]
            continue
        if any(alpha[i] < alpha[i + 1] for i in range(d - 1)):
            if abs(c) > tol * scale:
                raise NotSymmetric(f"leading exponent {alpha} is not a partition")
            del rest[alpha]
            continue
        beta = tuple(alpha[i] - (alpha[i + 1] if i + 1 < d else 0) for i in range(d))
        out[beta] = out.get(beta, 0) + c
        for a, v in _elementary_monomial(d, beta).terms.items():
            nv = rest.get(a, 0) - c * v
            if a == alpha or abs(nv) <= floor:
                rest.pop(a, None)
            else:
                rest[a] = nv
    return Polynomial(d, out)


def divide_linear(p: Polynomial, form: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Divide by a homogeneous linear form; returns (quotient, remainder).

    Synthetic division in the variable where the form has its largest
    coefficient; the remainder does not involve that variable.
    """
    if form.dim != p.dim:
        raise DimensionMismatch("form and polynomial dimensions differ")
    if form.degree != 1 or any(sum(a) != 1 for a in form.terms):
        raise ValueError("divisor must be a homogeneous linear form")
    d = p.dim
    coeffs = np.array([form.coefficient(tuple(int(j == i) for j in range(d))) for i in range(d)])
    k = int(np.argmax(np.abs(coeffs)))
    ck = coeffs[k]
    # z_k - r with r = -(sum_{j != k} c_j z_j) / c_k
    r = Polynomial(d, {tuple(int(i == j) for i in range(d)): -coeffs[j] / ck
                       for j in range(d) if j != k and coeffs[j] != 0})
    n = p.degree_in(k)
    if n <= 0:
        return Polynomial.zero(d), p
    slices: list[Polynomial] = []
    for e in range(n + 1):
        part = {}
        for alpha, c in p.terms.items():
            if alpha[k] == e:
                beta = list(alpha)
                beta[k] = 0
                part[tuple(beta)] = c
        slices.append(Polynomial(d, part, prune=False))
    q: list[Polynomial] = [Polynomial.zero(d)] * n
    q[n - 1] = slices[n]
    for i in range(n - 1, 0, -1):
        q[i - 1] = slices[i] + r * q[i]
    remainder = slices[0] + r * q[0]
    zk = Polynomial.variable(d, k)
    quotient = Polynomial.zero(d)
    for i, qi in enumerate(q):
        if not qi.is_zero():
            quotient = quotient + qi * zk ** i
    return quotient * (1 / ck), remainder


def random_polynomial(dim: int, degree: int, rng: np.random.Generator,
                      integer: bool = False, homogeneous: bool = False) -> Polynomial:
    """Dense random polynomial with standard complex Gaussian coefficients."""
    terms = {}
    for alpha in itertools.product(range(degree + 1), repeat=dim):
        total = sum(alpha)
        if total > degree or (homogeneous and total != degree):
            continue
        if integer:
            c = complex(int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
        else:
            c = complex(rng.standard_normal(), rng.standard_normal()) / math.sqrt(2)
        terms[alpha] = c
    return Polynomial(dim, terms)


def monomials_up_to(dim: int, degree: int) -> list[tuple[int, ...]]:
    """Exponent tuples with total degree at most ``degree`` in graded lex order."""
    out = [a for a in itertools.product(range(degree + 1), repeat=dim) if sum(a) <= degree]
    return sorted(out, key=grlex_key)



def divide_by_vandermonde(p: Polynomial) -> tuple[Polynomial, float]:
    """Divide by prod_{i<j} (z_i - z_j) one linear factor at a time.

    Returns the quotient and the largest remainder coefficient seen.
    """
    d = p.dim
    z = Polynomial.variables(d)
    quotient = p
    worst = 0.0
    for i, j in itertools.combinations(range(d), 2):
        quotient, rem = divide_linear(quotient, z[i] - z[j])
        worst = max(worst, rem.max_abs())
    return quotient, worst
