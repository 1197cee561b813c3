"""Exact arithmetic in truncated Artin local rings and Laurent polynomials over them.

The base ring is Q[e1..em]/m^(N+1), where m = (e1..em) is the maximal ideal.
A spec may additionally carry named generic parameters: invertible
indeterminates with integer exponents that do not count towards the
nilpotency degree. They realize the generic-parameter rings R[t, 1/t] used by
the annulus transition oracle.

All coefficients are fractions.Fraction. Elements are kept in canonical sparse
form (no stored zeros), so structural equality is ring equality.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from operator import add
from typing import Iterable, Mapping, Optional, Union

from formalcurves.errors import (
    NotAUnit,
    NotInvertible,
    NotSubstitutable,
    SpecMismatch,
)


logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]
Scalar = Union[int, Fraction]


# =============================================================================
# Ring spec
# =============================================================================

@dataclass(frozen=True)
class ArtinSpec:
    """The ring Q[e1..em]/m^(N+1), optionally with generic parameters adjoined."""
    num_vars: int
    trunc_order: int
    params: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if self.num_vars < 0:
            raise ValueError(f"num_vars must be nonnegative, got {self.num_vars}")
        if self.trunc_order < 1:
            raise ValueError(f"trunc_order must be positive, got {self.trunc_order}")
        if len(set(self.params)) != len(self.params):
            raise ValueError(f"duplicate generic parameters: {self.params}")

    @property
    def width(self) -> int:
        """Length of an exponent vector: nilpotent variables then parameters."""
        return self.num_vars + len(self.params)

    def degree(self, mono: Monomial) -> int:
        """Total degree in the nilpotent variables (parameters do not count)."""
        return sum(mono[: self.num_vars])

    def unit_monomial(self) -> Monomial:
        return (0,) * self.width

    def var_monomial(self, index: int) -> Monomial:
        """Exponent vector of e_index (1-based)."""
        if not 1 <= index <= self.num_vars:
            raise SpecMismatch(f"e{index} is not a variable of {self.describe()}")
        mono = [0] * self.width
        mono[index - 1] = 1
        return tuple(mono)

    def param_monomial(self, name: str, power: int = 1) -> Monomial:
        if name not in self.params:
            raise SpecMismatch(f"{name} is not a generic parameter of {self.describe()}")
        mono = [0] * self.width
        mono[self.num_vars + self.params.index(name)] = power
        return tuple(mono)

    def with_params(self, *names: str) -> "ArtinSpec":
        """Copy with the given parameters adjoined (existing ones kept)."""
        extra = tuple(n for n in names if n not in self.params)
        return ArtinSpec(self.num_vars, self.trunc_order, self.params + extra)

    def without_params(self, *names: str) -> "ArtinSpec":
        """Copy with the given parameters removed (all when none given)."""
        drop = set(names) if names else set(self.params)
        return ArtinSpec(self.num_vars, self.trunc_order, tuple(p for p in self.params if p not in drop))

    def check(self, other: "ArtinSpec") -> None:
        if self is not other and self != other:
            raise SpecMismatch(f"spec mismatch: {self.describe()} vs {other.describe()}")

    def describe(self) -> str:
        base = f"Q[e1..e{self.num_vars}]/m^{self.trunc_order + 1}"
        if self.params:
            base += "[" + ",".join(f"{p}^±1" for p in self.params) + "]"
        return base

    def to_json(self) -> dict:
        data = {"vars": self.num_vars, "order": self.trunc_order}
        if self.params:
            data["params"] = list(self.params)
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "ArtinSpec":
        return cls(int(data["vars"]), int(data["order"]), tuple(data.get("params", ())))


def check_same_spec(*specs: ArtinSpec) -> ArtinSpec:
    first = specs[0]
    for other in specs[1:]:
        first.check(other)
    return first


# =============================================================================
# Ring elements
# =============================================================================

def _accumulate(
    bucket: dict[Monomial, Fraction],
    left: list[tuple[Monomial, Fraction, int]],
    right: list[tuple[Monomial, Fraction, int]],
    limit: int,
) -> None:
    """Add the truncated product of two graded term lists into bucket."""
    for m1, c1, d1 in left:
        room = limit - d1
        for m2, c2, d2 in right:
            if d2 > room:
                continue
            mono = tuple(map(add, m1, m2))
            bucket[mono] = bucket.get(mono, 0) + c1 * c2


class RingElem:
    """An element of a truncated Artin ring, as a sparse monomial -> Fraction map."""

    __slots__ = ("spec", "_terms", "_hash", "_graded")

    def __init__(self, spec: ArtinSpec, terms: Optional[Mapping[Monomial, Scalar]] = None):
        self.spec = spec
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(mono)
            if len(mono) != spec.width:
                raise SpecMismatch(f"monomial {mono} does not fit {spec.describe()}")
            if any(e < 0 for e in mono[: spec.num_vars]):
                raise ValueError(f"negative nilpotent exponent in {mono}")
            if spec.degree(mono) > spec.trunc_order:
                continue
            value = Fraction(coeff)
            if value:
                clean[mono] = clean.get(mono, Fraction(0)) + value
                if not clean[mono]:
                    del clean[mono]
        self._terms = clean
        self._hash: Optional[int] = None
        self._graded: Optional[list[tuple[Monomial, Fraction, int]]] = None

    @classmethod
    def _make(cls, spec: ArtinSpec, terms: dict[Monomial, Fraction]) -> "RingElem":
        """Wrap terms already in canonical form (valid, truncated, no zeros)."""
        elem = cls.__new__(cls)
        elem.spec = spec
        elem._terms = terms
        elem._hash = None
        elem._graded = None
        return elem

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, spec: ArtinSpec) -> "RingElem":
        return cls(spec)

    @classmethod
    def one(cls, spec: ArtinSpec) -> "RingElem":
        return cls(spec, {spec.unit_monomial(): 1})

    @classmethod
    def scalar(cls, spec: ArtinSpec, value: Scalar) -> "RingElem":
        return cls(spec, {spec.unit_monomial(): value})

    @classmethod
    def var(cls, spec: ArtinSpec, index: int) -> "RingElem":
        return cls(spec, {spec.var_monomial(index): 1})

    @classmethod
    def param(cls, spec: ArtinSpec, name: str, power: int = 1) -> "RingElem":
        return cls(spec, {spec.param_monomial(name, power): 1})

    def _coerce(self, other) -> "RingElem":
        if isinstance(other, RingElem):
            self.spec.check(other.spec)
            return other
        if isinstance(other, (int, Fraction)):
            return RingElem.scalar(self.spec, other)
        return NotImplemented

    # -- structure ------------------------------------------------------------

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def _constant_monomials(self) -> list[Monomial]:
        nv = self.spec.num_vars
        return [m for m in self._terms if not any(m[:nv])]

    def constant_part(self) -> "RingElem":
        """The part of nilpotent degree 0 (a Laurent monomial sum in the parameters)."""
        return RingElem._make(self.spec, {m: self._terms[m] for m in self._constant_monomials()})

    def constant_term(self) -> Fraction:
        """Coefficient of the monomial 1."""
        return self._terms.get(self.spec.unit_monomial(), Fraction(0))

    def order(self) -> int:
        """Lowest nilpotent degree present (trunc_order + 1 for zero)."""
        if not self._terms:
            return self.spec.trunc_order + 1
        return min(d for _, _, d in self.graded())

    def is_unit(self) -> bool:
        """A unit has constant part a single nonzero monomial."""
        return len(self._constant_monomials()) == 1

    def is_nilpotent(self) -> bool:
        return not self._constant_monomials()

    def is_generic_unit(self) -> bool:
        """A unit whose leading monomial involves a generic parameter."""
        if not self.is_unit():
            return False
        (mono,) = self.constant_part()._terms
        return any(mono[self.spec.num_vars:])

    def is_scalar(self) -> bool:
        return all(m == self.spec.unit_monomial() for m in self._terms)

    def reduce(self) -> "RingElem":
        """Reduction modulo the maximal ideal (all e_i set to zero)."""
        return self.constant_part()

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for mono, coeff in other._terms.items():
            total = terms.get(mono, 0) + coeff
            if total:
                terms[mono] = total
            else:
                del terms[mono]
        return RingElem._make(self.spec, terms)

    __radd__ = __add__

    def __neg__(self) -> "RingElem":
        return RingElem._make(self.spec, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def graded(self) -> list[tuple[Monomial, Fraction, int]]:
        """(monomial, coefficient, nilpotent degree) triples, cached."""
        if self._graded is None:
            nv = self.spec.num_vars
            self._graded = [(m, c, sum(m[:nv])) for m, c in self._terms.items()]
        return self._graded

    def __mul__(self, other) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[Monomial, Fraction] = {}
        _accumulate(terms, self.graded(), other.graded(), self.spec.trunc_order)
        return RingElem._make(self.spec, {m: c for m, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "RingElem":
        if exponent < 0:
            return self.invert() ** (-exponent)
        result = RingElem.one(self.spec)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __truediv__(self, other) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.invert()

    def invert(self) -> "RingElem":
        """Inverse of a unit via the finite geometric series.

        Raises:
            NotAUnit: If the constant part is not a single nonzero monomial.
        """
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit")
        ((mono, coeff),) = self.constant_part()._terms.items()
        lead_inv = RingElem(self.spec, {tuple(-e for e in mono): 1 / coeff})
        tail = self * lead_inv - 1
        result = RingElem.one(self.spec)
        power = RingElem.one(self.spec)
        for _ in range(self.spec.trunc_order):
            power = power * (-tail)
            if power.is_zero():
                break
            result = result + power
        return result * lead_inv

    # -- change of ring -------------------------------------------------------

    def lift(self, target: ArtinSpec) -> "RingElem":
        """Embed into a spec with the same nilpotent part and more parameters."""
        if (target.num_vars, target.trunc_order) != (self.spec.num_vars, self.spec.trunc_order):
            raise SpecMismatch(f"cannot lift {self.spec.describe()} into {target.describe()}")
        missing = [p for p in self.spec.params if p not in target.params]
        if missing:
            raise SpecMismatch(f"target spec lacks parameters {missing}")
        nv = self.spec.num_vars
        terms = {}
        for mono, coeff in self._terms.items():
            new = [0] * target.width
            new[:nv] = mono[:nv]
            for idx, name in enumerate(self.spec.params):
                new[nv + target.params.index(name)] = mono[nv + idx]
            terms[tuple(new)] = coeff
        return RingElem(target, terms)

    def specialize(self, values: Mapping[str, "RingElem"], target: ArtinSpec) -> "RingElem":
        """Substitute generic parameters by elements of ``target``.

        Parameters not in ``values`` must survive in ``target``. Negative
        exponents require the substituted value to be a unit.
        """
        nv = self.spec.num_vars
        result = RingElem.zero(target)
        for mono, coeff in self._terms.items():
            term = RingElem.scalar(target, coeff)
            for i in range(nv):
                if mono[i]:
                    term = term * RingElem.var(target, i + 1) ** mono[i]
            for idx, name in enumerate(self.spec.params):
                power = mono[nv + idx]
                if not power:
                    continue
                if name in values:
                    value = values[name]
                    target.check(value.spec)
                    term = term * value ** power
                else:
                    term = term * RingElem.param(target, name, power)
            result = result + term
        return result

    # -- protocol -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._terms == RingElem.scalar(self.spec, other)._terms
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.spec == other.spec and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.spec, frozenset(self._terms.items())))
        return self._hash

    def _format_monomial(self, mono: Monomial) -> str:
        names = [f"e{i + 1}" for i in range(self.spec.num_vars)] + list(self.spec.params)
        parts = []
        for name, exp in zip(names, mono):
            if exp == 1:
                parts.append(name)
            elif exp:
                parts.append(f"{name}^{exp}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for mono, coeff in sorted(self._terms.items(), key=lambda t: (self.spec.degree(t[0]), t[0])):
            body = self._format_monomial(mono)
            if not body:
                out.append(str(coeff))
            elif coeff == 1:
                out.append(body)
            elif coeff == -1:
                out.append(f"-{body}")
            else:
                out.append(f"{coeff}*{body}")
        return " + ".join(out).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"RingElem({self})"

    # -- serialization --------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [
            {"monomial": list(mono), "num": str(coeff.numerator), "den": str(coeff.denominator)}
            for mono, coeff in sorted(self._terms.items())
        ]

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Iterable[Mapping]) -> "RingElem":
        terms: dict[Monomial, Fraction] = {}
        for item in data:
            mono = tuple(int(e) for e in item["monomial"])
            terms[mono] = terms.get(mono, Fraction(0)) + Fraction(int(item["num"]), int(item["den"]))
        return cls(spec, terms)


def ring_mul(a: RingElem, b: RingElem) -> RingElem:
    """Product in the truncated ring; monomials above the truncation order vanish."""
    a.spec.check(b.spec)
    return a * b


def ring_invert(a: RingElem) -> RingElem:
    """Inverse of a unit. Raises NotAUnit for non-units."""
    return a.invert()


# =============================================================================
# Laurent polynomials
# =============================================================================

class LaurentPoly:
    """A finite Laurent polynomial in u with coefficients in an Artin ring.

    Instances are immutable; the multiplicative inverse and the powers used by
    substitution are cached on first use.
    """

    __slots__ = ("spec", "_terms", "_hash", "_inverse", "_powers")

    def __init__(self, spec: ArtinSpec, terms: Optional[Mapping[int, Union[RingElem, Scalar]]] = None):
        self.spec = spec
        clean: dict[int, RingElem] = {}
        for exp, coeff in (terms or {}).items():
            if not isinstance(coeff, RingElem):
                coeff = RingElem.scalar(spec, coeff)
            spec.check(coeff.spec)
            if not coeff.is_zero():
                clean[int(exp)] = coeff
        self._terms = clean
        self._hash: Optional[int] = None
        self._inverse: Optional["LaurentPoly"] = None
        self._powers: Optional[list["LaurentPoly"]] = None

    @classmethod
    def _make(cls, spec: ArtinSpec, terms: dict[int, RingElem]) -> "LaurentPoly":
        """Wrap nonzero coefficients over ``spec`` without revalidating them."""
        poly = cls.__new__(cls)
        poly.spec = spec
        poly._terms = terms
        poly._hash = None
        poly._inverse = None
        poly._powers = None
        return poly

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, spec: ArtinSpec) -> "LaurentPoly":
        return cls(spec)

    @classmethod
    def constant(cls, spec: ArtinSpec, value: Union[RingElem, Scalar]) -> "LaurentPoly":
        return cls(spec, {0: value})

    @classmethod
    def monomial(cls, spec: ArtinSpec, exp: int, coeff: Union[RingElem, Scalar] = 1) -> "LaurentPoly":
        return cls(spec, {exp: coeff})

    @classmethod
    def identity(cls, spec: ArtinSpec) -> "LaurentPoly":
        """The polynomial u, the identity for substitution."""
        return cls(spec, {1: 1})

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self.spec.check(other.spec)
            return other
        if isinstance(other, (RingElem, int, Fraction)):
            return LaurentPoly.constant(self.spec, other)
        return NotImplemented

    # -- structure ------------------------------------------------------------

    @property
    def terms(self) -> dict[int, RingElem]:
        return dict(self._terms)

    def items(self) -> list[tuple[int, RingElem]]:
        return sorted(self._terms.items())

    def coeff(self, exp: int) -> RingElem:
        return self._terms.get(exp, RingElem.zero(self.spec))

    def exponents(self) -> list[int]:
        return sorted(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def monomial_unit_degree(self) -> Optional[int]:
        """Return k if self = c*u^k*(1 + nilpotent) with c a unit, else None."""
        units = [k for k, c in self._terms.items() if not c.is_nilpotent()]
        if len(units) != 1:
            return None
        (k,) = units
        return k if self._terms[k].is_unit() else None

    def nilpotent_tail(self) -> bool:
        """Every coefficient except possibly the u^1 one is nilpotent."""
        return all(c.is_nilpotent() for k, c in self._terms.items() if k != 1)

    def unit_form(self) -> bool:
        """self = u*w with w a unit at u^0 and nilpotent elsewhere."""
        return self.monomial_unit_degree() == 1

    def map_coeffs(self, fn, spec: Optional[ArtinSpec] = None) -> "LaurentPoly":
        spec = spec or self.spec
        return LaurentPoly(spec, {k: fn(c) for k, c in self._terms.items()})

    def reduce(self) -> "LaurentPoly":
        return self.map_coeffs(RingElem.reduce)

    def reflect(self) -> "LaurentPoly":
        """The polynomial f(1/u)."""
        return LaurentPoly(self.spec, {-k: c for k, c in self._terms.items()})

    def lift(self, target: ArtinSpec) -> "LaurentPoly":
        return self.map_coeffs(lambda c: c.lift(target), target)

    def specialize(self, values: Mapping[str, RingElem], target: ArtinSpec) -> "LaurentPoly":
        return self.map_coeffs(lambda c: c.specialize(values, target), target)

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for k, c in other._terms.items():
            if k in terms:
                total = terms[k] + c
                if total.is_zero():
                    del terms[k]
                else:
                    terms[k] = total
            else:
                terms[k] = c
        return LaurentPoly._make(self.spec, terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._make(self.spec, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        spec = self.spec
        limit = spec.trunc_order
        right = [(k2, c2.graded(), c2.order()) for k2, c2 in other._terms.items()]
        buckets: dict[int, dict[Monomial, Fraction]] = {}
        for k1, c1 in self._terms.items():
            left = c1.graded()
            room = limit - c1.order()
            for k2, graded, order in right:
                if order > room:
                    continue
                _accumulate(buckets.setdefault(k1 + k2, {}), left, graded, limit)
        terms = {}
        for k, bucket in buckets.items():
            clean = {m: c for m, c in bucket.items() if c}
            if clean:
                terms[k] = RingElem._make(spec, clean)
        return LaurentPoly._make(spec, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "LaurentPoly":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = LaurentPoly.constant(self.spec, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "LaurentPoly":
        """Multiplicative inverse of c*u^k*(1 + r) with r nilpotent.

        Raises:
            NotInvertible: If self is not a monomial unit.
        """
        if self._inverse is not None:
            return self._inverse
        k = self.monomial_unit_degree()
        if k is None:
            raise NotInvertible(f"{self} is not a monomial unit")
        lead_inv = self._terms[k].invert()
        normalized = self * LaurentPoly.monomial(self.spec, -k, lead_inv)
        tail = normalized - 1
        result = LaurentPoly.constant(self.spec, 1)
        power = LaurentPoly.constant(self.spec, 1)
        for _ in range(self.spec.trunc_order):
            power = power * (-tail)
            if power.is_zero():
                break
            result = result + power
        self._inverse = result * LaurentPoly.monomial(self.spec, -k, lead_inv)
        self._inverse._inverse = self
        return self._inverse

    def powers(self, count: int) -> list["LaurentPoly"]:
        """[1, self, self^2, ..., self^count], extending a cached list."""
        if self._powers is None:
            self._powers = [LaurentPoly.constant(self.spec, 1)]
        while len(self._powers) <= count:
            self._powers.append(self._powers[-1] * self)
        return self._powers[: count + 1]

    # -- protocol -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, RingElem)):
            return self == LaurentPoly.constant(self.spec, other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.spec == other.spec and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.spec, frozenset(self._terms.items())))
        return self._hash

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items()):
            power = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            if not power:
                parts.append(f"({c})")
            elif c == 1:
                parts.append(power)
            else:
                parts.append(f"({c})*{power}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    # -- serialization --------------------------------------------------------

    def to_json(self) -> list[dict]:
        return [{"exp": k, "coeff": c.to_json()} for k, c in sorted(self._terms.items())]

    @classmethod
    def from_json(cls, spec: ArtinSpec, data: Iterable[Mapping]) -> "LaurentPoly":
        terms: dict[int, RingElem] = {}
        for item in data:
            k = int(item["exp"])
            c = RingElem.from_json(spec, item["coeff"])
            terms[k] = terms[k] + c if k in terms else c
        return cls(spec, terms)


# =============================================================================
# Substitution and compositional inverse
# =============================================================================

def laurent_substitute(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Compute f(g(u)) for g in unit form.

    Args:
        f: Any Laurent polynomial.
        g: A Laurent polynomial u*w with w a unit at u^0 and nilpotent elsewhere.

    Returns:
        The exact composite sum f_k * g^k.

    Raises:
        NotSubstitutable: If g is not in unit form.
    """
    f.spec.check(g.spec)
    if not g.unit_form():
        raise NotSubstitutable(f"cannot substitute {g}: not of the form u*(unit + nilpotent)")
    if f.is_zero():
        return f
    exps = f.exponents()
    result = LaurentPoly.zero(f.spec)
    if exps[-1] >= 0:
        for k, power in enumerate(g.powers(exps[-1])):
            if k in f._terms:
                result = result + power * f._terms[k]
    if exps[0] < 0:
        for k, power in enumerate(g.inverse().powers(-exps[0])):
            if k and -k in f._terms:
                result = result + power * f._terms[-k]
    return result


def compose(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Alias for laurent_substitute, read as the map composite f after g."""
    return laurent_substitute(f, g)


def compositional_inverse(g: LaurentPoly) -> LaurentPoly:
    """Two-sided inverse of g under substitution.

    Fixed-point iteration h <- h - (g(h) - u)/c, with c the reduced linear
    coefficient of g. If g - c*u has order k in the maximal ideal, every round
    raises the order of the error by at least k, so at most trunc_order + 1
    rounds are needed and maps close to the identity converge in a few.

    Raises:
        NotInvertible: If g is not in unit form.
    """
    if not g.unit_form():
        raise NotInvertible(f"{g} is not in unit form")
    spec = g.spec
    lead_inv = g.coeff(1).constant_part().invert()
    u = LaurentPoly.identity(spec)
    h = u * lead_inv
    for rounds in range(spec.trunc_order + 2):
        err = laurent_substitute(g, h) - u
        if err.is_zero():
            logger.debug(f"compositional inverse converged after {rounds} rounds")
            return h
        h = h - err * lead_inv
    raise NotInvertible(f"inversion of {g} did not converge")
