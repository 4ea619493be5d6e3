from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Literal, TypeAlias, Union

from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)
from sympy.polys.domains import QQ
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, PolyRing

from zastava.conf import app_settings

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

__all__ = [
    "Ambient",
    "LinearForm",
    "LinearProduct",
    "MPoly",
    "RatFunc",
    "Variable",
    "elem_sym",
    "elementary",
    "evaluate",
    "is_invariant",
    "poly_arith",
    "poly_from_text",
    "poly_to_text",
    "reduce_fraction",
]

MPoly: TypeAlias = PolyElement
Rational: TypeAlias = Union[Fraction, int]

_TRANSFORMATIONS = (*standard_transformations, convert_xor)


def to_fraction(value: Any) -> Fraction:
    """Convert a ``QQ`` ground element (or anything rational) to Fraction."""
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def to_ground(value: Rational) -> Any:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


@dataclass(frozen=True, order=True)
class Variable:
    """
    The coordinate ``a^color_slot`` of the configuration space. Variables
    compare lexicographically on ``(color, slot)``.
    """

    color: str
    slot: int

    @property
    def name(self) -> str:
        return "a_%s_%d" % (self.color, self.slot)

    def __str__(self) -> str:
        return self.name


class Ambient:
    """
    A fixed, ordered set of coordinates together with the polynomial ring
    ``QQ[a...]`` over them. The monomial order is lex in the given order.
    """

    def __init__(self, variables: Iterable[Variable]) -> None:
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("Ambient variables must be distinct")
        self.ring = _get_ring(tuple(v.name for v in self.variables))
        self._index = {v: i for i, v in enumerate(self.variables)}

    def __repr__(self) -> str:
        return "Ambient(%s)" % ", ".join(v.name for v in self.variables)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ambient):
            return NotImplemented
        return self.variables == other.variables

    def __hash__(self) -> int:
        return hash(self.variables)

    def __contains__(self, variable: object) -> bool:
        return variable in self._index

    def index(self, variable: Variable) -> int:
        try:
            return self._index[variable]
        except KeyError:
            raise ValueError("%s is not declared in %r" % (variable, self)) from None

    def gen(self, variable: Variable) -> MPoly:
        return self.ring.gens[self.index(variable)]

    def const(self, value: Rational) -> MPoly:
        return self.ring.ground_new(to_ground(value))

    @property
    def zero(self) -> MPoly:
        return self.ring.zero

    @property
    def one(self) -> MPoly:
        return self.ring.one


@functools.lru_cache(maxsize=None)
def _get_ring(names: tuple[str, ...]) -> PolyRing:
    return PolyRing(",".join(names), QQ, lex)


@dataclass(frozen=True, order=True)
class LinearForm:
    """The difference ``left - right`` of two distinct coordinates."""

    left: Variable
    right: Variable

    def __post_init__(self) -> None:
        if self.left == self.right:
            raise ValueError("Linear form %s - %s is zero" % (self.left, self.right))

    def __neg__(self) -> LinearForm:
        return LinearForm(self.right, self.left)

    def __str__(self) -> str:
        return "%s - %s" % (self.left, self.right)

    def pair(self, values: Mapping[Variable, int]) -> int:
        """Pair this character with a cocharacter given by its coordinates."""
        return values[self.left] - values[self.right]

    def normalized(self) -> tuple[LinearForm, int]:
        """Return the form with ``left < right`` and the sign relating them."""
        if self.left < self.right:
            return self, 1
        return -self, -1

    def to_poly(self, ambient: Ambient) -> MPoly:
        return ambient.gen(self.left) - ambient.gen(self.right)

    def evaluate(self, point: Mapping[Variable, Rational]) -> Fraction:
        return Fraction(point[self.left]) - Fraction(point[self.right])


@dataclass(frozen=True)
class LinearProduct:
    """
    An exact product ``unit * prod(form ** exponent)`` of linear difference
    forms with integer (possibly negative) exponents. Forms are stored with
    ``left < right``; the sign of flipped forms is absorbed into ``unit``.
    """

    unit: Fraction = Fraction(1)
    factors: tuple[tuple[LinearForm, int], ...] = ()

    @classmethod
    def of(
        cls,
        items: Iterable[tuple[LinearForm, int]] = (),
        *,
        unit: Rational = 1,
    ) -> LinearProduct:
        value = Fraction(unit)
        if value == 0:
            raise ValueError("LinearProduct unit must be nonzero")
        exponents: dict[LinearForm, int] = {}
        for form, exponent in items:
            form, sign = form.normalized()
            if sign < 0 and exponent % 2:
                value = -value
            exponents[form] = exponents.get(form, 0) + exponent
        return cls(
            unit=value,
            factors=tuple(sorted((f, e) for f, e in exponents.items() if e)),
        )

    def __mul__(self, other: LinearProduct) -> LinearProduct:
        return LinearProduct.of(
            (*self.factors, *other.factors), unit=self.unit * other.unit
        )

    def __truediv__(self, other: LinearProduct) -> LinearProduct:
        return self * other**-1

    def __pow__(self, exponent: int) -> LinearProduct:
        return LinearProduct.of(
            ((f, e * exponent) for f, e in self.factors),
            unit=self.unit**exponent,
        )

    def __neg__(self) -> LinearProduct:
        return LinearProduct(unit=-self.unit, factors=self.factors)

    def __str__(self) -> str:
        parts = [str(self.unit)] if self.unit != 1 or not self.factors else []
        for form, exponent in self.factors:
            base = "(%s)" % form
            parts.append(base if exponent == 1 else "%s^%d" % (base, exponent))
        return "*".join(parts)

    @property
    def is_constant(self) -> bool:
        return not self.factors

    def split(self) -> tuple[LinearProduct, LinearProduct]:
        """
        Split into ``(numerator, denominator)`` with nonnegative exponents on
        both sides; the unit stays with the numerator.
        """
        numer = LinearProduct.of(
            ((f, e) for f, e in self.factors if e > 0), unit=self.unit
        )
        denom = LinearProduct.of((f, -e) for f, e in self.factors if e < 0)
        return numer, denom

    def to_poly(self, ambient: Ambient) -> MPoly:
        if any(e < 0 for _, e in self.factors):
            raise ValueError("%s has negative exponents" % self)
        result = ambient.const(self.unit)
        for form, exponent in self.factors:
            result *= form.to_poly(ambient) ** exponent
        return result

    def expand(self, ambient: Ambient) -> RatFunc:
        """
        Multiply out over ``ambient``. Distinct normalized forms are coprime,
        so the split parts only need a monic denominator to be reduced.
        """
        numer, denom = (part.to_poly(ambient) for part in self.split())
        lc = denom.LC
        return RatFunc(numer.quo_ground(lc), denom.quo_ground(lc))

    def evaluate(self, point: Mapping[Variable, Rational]) -> Fraction:
        value = self.unit
        for form, exponent in self.factors:
            base = form.evaluate(point)
            if base == 0 and exponent < 0:
                raise ZeroDivisionError("%s vanishes at the given point" % form)
            value *= base**exponent
        return value


@functools.lru_cache(maxsize=None)
def _difference_forms(ring: PolyRing) -> tuple[MPoly, ...]:
    return tuple(x - y for x, y in itertools.combinations(ring.gens, 2))


def _cancel_linear_factors(numer: MPoly, denom: MPoly) -> tuple[MPoly, MPoly]:
    for form in _difference_forms(numer.ring):
        while not denom.is_ground:
            q_den, r_den = denom.div(form)
            if not r_den.is_zero:
                break
            q_num, r_num = numer.div(form)
            if not r_num.is_zero:
                break
            numer, denom = q_num, q_den
    return numer, denom


def reduce_fraction(
    numer: MPoly,
    denom: MPoly,
    *,
    full_gcd: bool | None = None,
) -> tuple[MPoly, MPoly]:
    """
    Normalize ``numer / denom``: cancel common factors of the form
    ``a_x - a_y`` (or the full gcd when enabled) and scale so that the leading
    coefficient of the denominator is one.
    """
    if denom.is_zero:
        raise ZeroDivisionError("Denominator is zero")
    ring = numer.ring
    if numer.is_zero:
        return ring.zero, ring.one
    if full_gcd is None:
        full_gcd = app_settings.FULL_GCD
    if full_gcd:
        _, numer, denom = numer.cofactors(denom)
    else:
        numer, denom = _cancel_linear_factors(numer, denom)
    lc = denom.LC
    return numer.quo_ground(lc), denom.quo_ground(lc)


class RatFunc:
    """
    A reduced fraction of polynomials over a common ring. Instances are
    immutable; equality is decided by cross multiplication.
    """

    __slots__ = ("denom", "numer")

    numer: MPoly
    denom: MPoly

    def __init__(self, numer: MPoly, denom: MPoly) -> None:
        if numer.ring != denom.ring:
            raise ValueError("Numerator and denominator live in different rings")
        if denom.is_zero:
            raise ZeroDivisionError("Denominator is zero")
        object.__setattr__(self, "numer", numer)
        object.__setattr__(self, "denom", denom)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("RatFunc is immutable")

    @classmethod
    def new(
        cls,
        numer: MPoly,
        denom: MPoly | None = None,
        *,
        full_gcd: bool | None = None,
    ) -> RatFunc:
        if denom is None:
            denom = numer.ring.one
        return cls(*reduce_fraction(numer, denom, full_gcd=full_gcd))

    @property
    def ring(self) -> PolyRing:
        return self.numer.ring

    @property
    def is_zero(self) -> bool:
        return bool(self.numer.is_zero)

    @property
    def is_polynomial(self) -> bool:
        return bool(self.denom.is_ground)

    def as_poly(self) -> MPoly:
        if not self.is_polynomial:
            raise ValueError("%s is not a polynomial" % self)
        return self.numer.quo_ground(self.denom.LC)

    def _coerce(self, other: object) -> RatFunc | None:
        if isinstance(other, RatFunc):
            result = other
        elif isinstance(other, PolyElement):
            result = RatFunc(other, other.ring.one)
        elif isinstance(other, (int, Fraction)):
            one = self.ring.one
            result = RatFunc(one * to_ground(other), one)
        else:
            return None
        if result.ring != self.ring:
            raise ValueError("Operands do not share an ambient ring")
        return result

    def __add__(self, other: object) -> RatFunc:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return RatFunc.new(
            self.numer * rhs.denom + rhs.numer * self.denom,
            self.denom * rhs.denom,
        )

    __radd__ = __add__

    def __neg__(self) -> RatFunc:
        return RatFunc(-self.numer, self.denom)

    def __sub__(self, other: object) -> RatFunc:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> RatFunc:
        return -self + other

    def __mul__(self, other: object) -> RatFunc:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return RatFunc.new(self.numer * rhs.numer, self.denom * rhs.denom)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> RatFunc:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if rhs.is_zero:
            raise ZeroDivisionError("Division by zero")
        return RatFunc.new(self.numer * rhs.denom, self.denom * rhs.numer)

    def __rtruediv__(self, other: object) -> RatFunc:
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs / self

    def __eq__(self, other: object) -> bool:
        try:
            rhs = self._coerce(other)
        except ValueError:
            return False
        if rhs is None:
            return NotImplemented
        return bool(self.numer * rhs.denom == rhs.numer * self.denom)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return "RatFunc(%s)" % self

    def __str__(self) -> str:
        return ratfunc_to_text(self)


Operand: TypeAlias = Union[PolyElement, RatFunc]


def poly_arith(
    op: Literal["add", "mul", "neg", "exact_div"],
    x: Operand,
    y: Operand | None = None,
) -> Operand:
    """
    Apply a ring operation to polynomials or rational functions sharing one
    ambient ring. ``exact_div`` of two polynomials fails unless the divisor
    divides the dividend exactly.
    """
    if op == "neg":
        return -x
    if y is None:
        raise ValueError("Operation %r needs two operands" % op)
    if x.ring != y.ring:
        raise ValueError("Operands do not share an ambient ring")
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "exact_div":
        if isinstance(x, RatFunc) or isinstance(y, RatFunc):
            lhs = x if isinstance(x, RatFunc) else RatFunc(x, x.ring.one)
            return lhs / y
        if y.is_zero:
            raise ZeroDivisionError("Division by zero")
        try:
            return x.exquo(y)
        except ExactQuotientFailed:
            raise ValueError(
                "%s is not divisible by %s" % (poly_to_text(x), poly_to_text(y))
            ) from None
    raise ValueError("Unknown operation %r" % op)


def elementary(s: int, values: Sequence[Any], one: Any) -> Any:
    """
    The elementary symmetric function ``e_s`` of ``values`` in any
    commutative ring whose unit is ``one``. Each value is folded into
    ``e_1..e_s`` from the top degree down.
    """
    if s < 0:
        raise ValueError("Degree must be nonnegative, got %d" % s)
    if s > len(values):
        return one - one
    table = [one] + [one - one] * s
    for value in values:
        for k in range(s, 0, -1):
            table[k] = table[k] + table[k - 1] * value
    return table[s]


def elem_sym(s: int, variables: Sequence[Variable], ambient: Ambient) -> MPoly:
    return elementary(s, [ambient.gen(v) for v in variables], ambient.one)


def _evaluate_poly(poly: MPoly, values: Mapping[str, Fraction]) -> Fraction:
    ring = poly.ring
    pairs = []
    for i, symbol in enumerate(ring.symbols):
        name = str(symbol)
        if name in values:
            pairs.append((ring.gens[i], to_ground(values[name])))
        elif poly.degree(i) > 0:
            raise ValueError("Point does not assign %s" % name)
        else:
            pairs.append((ring.gens[i], QQ.zero))
    return to_fraction(poly.evaluate(pairs))


def evaluate(x: Operand, point: Mapping[Variable, Rational]) -> Fraction:
    """
    Evaluate exactly at a rational point. Raises ``ZeroDivisionError`` when
    the denominator vanishes, i.e. the point is a pole.
    """
    values = {v.name: Fraction(value) for v, value in point.items()}
    if isinstance(x, RatFunc):
        denom = _evaluate_poly(x.denom, values)
        if denom == 0:
            raise ZeroDivisionError("Denominator vanishes at the given point")
        return _evaluate_poly(x.numer, values) / denom
    return _evaluate_poly(x, values)


def _swap_poly(poly: MPoly, i: int, j: int) -> MPoly:
    x, y = poly.ring.gens[i], poly.ring.gens[j]
    return poly.compose([(x, y), (y, x)])


def is_invariant(
    x: Operand,
    transpositions: Iterable[tuple[Variable, Variable]],
) -> bool:
    """Check whether ``x`` is fixed by each same-color slot transposition."""
    names = [str(symbol) for symbol in x.ring.symbols]
    for left, right in transpositions:
        if left.color != right.color:
            raise ValueError(
                "Transposition %s <-> %s mixes colors" % (left.name, right.name)
            )
        try:
            i, j = names.index(left.name), names.index(right.name)
        except ValueError:
            # Swapping absent variables is the identity.
            continue
        if isinstance(x, RatFunc):
            swapped = RatFunc(_swap_poly(x.numer, i, j), _swap_poly(x.denom, i, j))
            if swapped != x:
                return False
        elif _swap_poly(x, i, j) != x:
            return False
    return True


def _coeff_to_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return "%d/%d" % (value.numerator, value.denominator)


def poly_to_text(poly: MPoly, names: Sequence[str] | None = None) -> str:
    """
    Canonical text of a polynomial: terms in descending monomial order,
    ``*`` between factors, ``^`` for powers and rationals written ``p/q``.

    :param names: Spelling of the ring variables, in ring order. Defaults to
        the variable names of the ring.
    """
    if poly.is_zero:
        return "0"
    if names is None:
        names = [str(symbol) for symbol in poly.ring.symbols]
    out = []
    for monom, coeff in poly.terms():
        value = to_fraction(coeff)
        factors = [
            name if exponent == 1 else "%s^%d" % (name, exponent)
            for name, exponent in zip(names, monom)
            if exponent
        ]
        sign = "-" if value < 0 else "+"
        magnitude = abs(value)
        if not factors:
            body = _coeff_to_text(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = "*".join([_coeff_to_text(magnitude), *factors])
        out.append((sign, body))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in out[1:]:
        text += " %s %s" % (sign, body)
    return text


def ratfunc_to_text(value: RatFunc) -> str:
    numer = poly_to_text(value.numer)
    if value.denom == value.ring.one:
        return numer
    return "(%s)/(%s)" % (numer, poly_to_text(value.denom))


def poly_from_text(text: str, ring: PolyRing) -> MPoly:
    """Parse canonical (or any sympy-readable) polynomial text in ``ring``."""
    names = {str(symbol): symbol for symbol in ring.symbols}
    try:
        expr = parse_expr(text, local_dict=names, transformations=_TRANSFORMATIONS)
        return ring.from_expr(expr)
    except (SyntaxError, TypeError, ValueError) as exc:
        raise ValueError("Could not parse polynomial %r" % text) from exc
