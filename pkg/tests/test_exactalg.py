from fractions import Fraction

from django.test import override_settings

import pytest
from hypothesis import given, settings, strategies as st
from sympy.polys.domains import QQ

from zastava.exactalg import (
    Ambient,
    LinearForm,
    LinearProduct,
    MPoly,
    RatFunc,
    Variable,
    elem_sym,
    evaluate,
    is_invariant,
    poly_arith,
    poly_from_text,
    poly_to_text,
    reduce_fraction,
)

V1, V2, V3 = Variable("v", 1), Variable("v", 2), Variable("v", 3)
W1 = Variable("w", 1)
AMBIENT = Ambient([V1, V2, V3])
RING = AMBIENT.ring
a1, a2, a3 = (AMBIENT.gen(v) for v in (V1, V2, V3))

polynomials = st.dictionaries(
    st.tuples(*(st.integers(0, 2),) * 3),
    st.integers(-3, 3).filter(bool),
    max_size=4,
).map(RING.from_dict)


def _denominator(drawn: tuple[int, list[tuple[int, int]]]) -> object:
    constant, pairs = drawn
    result = RING(constant)
    for i, j in pairs:
        result *= RING.gens[i] - RING.gens[j]
    return result


denominators = st.tuples(
    st.integers(1, 3),
    st.lists(st.sampled_from([(0, 1), (0, 2), (1, 2)]), max_size=3),
).map(_denominator)
ratfuncs = st.builds(RatFunc.new, polynomials, denominators)

axioms = settings(derandomize=True, max_examples=40, deadline=None)


@axioms
@given(ratfuncs, ratfuncs, ratfuncs)
def test_addition_is_associative(x: RatFunc, y: RatFunc, z: RatFunc) -> None:
    assert (x + y) + z == x + (y + z)


@axioms
@given(ratfuncs, ratfuncs)
def test_multiplication_is_commutative(x: RatFunc, y: RatFunc) -> None:
    assert x * y == y * x


@axioms
@given(ratfuncs, ratfuncs, ratfuncs)
def test_multiplication_distributes(x: RatFunc, y: RatFunc, z: RatFunc) -> None:
    assert x * (y + z) == x * y + x * z


@axioms
@given(ratfuncs)
def test_additive_inverse(x: RatFunc) -> None:
    assert (x - x).is_zero
    assert (x + (-x)) == 0


@axioms
@given(ratfuncs, ratfuncs)
def test_division_undoes_multiplication(x: RatFunc, y: RatFunc) -> None:
    if y.is_zero:
        with pytest.raises(ZeroDivisionError):
            x / y
    else:
        assert (x / y) * y == x


@axioms
@given(ratfuncs)
def test_denominator_is_monic(x: RatFunc) -> None:
    assert x.denom.LC == 1


def test_poly_arith() -> None:
    assert poly_arith("add", a1, poly_arith("neg", a1)) == 0
    assert poly_arith("mul", a1 - a2, a2 - a1) == -((a1 - a2) ** 2)
    assert poly_arith("exact_div", a1**2 - a2**2, a1 - a2) == a1 + a2


def test_poly_arith_mixed_operands() -> None:
    x = RatFunc.new(RING.one, a1 - a2)
    assert poly_arith("mul", x, RatFunc.new(a1 - a2)) == 1
    assert poly_arith("exact_div", a1, x) == a1 * (a1 - a2)


def test_poly_arith_errors() -> None:
    with pytest.raises(ValueError, match="not divisible") as ctx:
        poly_arith("exact_div", a1, a2)
    assert ctx.value.args == ("a_v_1 is not divisible by a_v_2",)

    with pytest.raises(ZeroDivisionError):
        poly_arith("exact_div", a1, RING.zero)
    with pytest.raises(ValueError, match="two operands"):
        poly_arith("add", a1)
    with pytest.raises(ValueError, match="share an ambient ring"):
        poly_arith("add", a1, Ambient([W1]).gen(W1))


@pytest.mark.parametrize(
    "s, variables, expected",
    (
        (0, (V1, V2), RING.one),
        (1, (V1, V2), a1 + a2),
        (2, (V1, V2, V3), a1 * a2 + a1 * a3 + a2 * a3),
        (3, (V1, V2), RING.zero),
        (3, (V1, V2, V3), a1 * a2 * a3),
    ),
)
def test_elem_sym(s: int, variables: tuple[Variable, ...], expected: object) -> None:
    assert elem_sym(s, variables, AMBIENT) == expected


def test_elem_sym_negative_degree() -> None:
    with pytest.raises(ValueError, match="nonnegative"):
        elem_sym(-1, (V1,), AMBIENT)


def test_evaluate() -> None:
    assert evaluate(a1 - a2, {V1: 0, V2: 1}) == -1
    assert evaluate(elem_sym(2, (V1, V2), AMBIENT), {V1: 2, V2: 3}) == 6
    assert evaluate(RatFunc.new(a1, a1 - a2), {V1: 1, V2: Fraction(1, 2)}) == 2

    with pytest.raises(ZeroDivisionError):
        evaluate(RatFunc.new(RING.one, a1 - a2), {V1: 1, V2: 1})
    with pytest.raises(ValueError, match="does not assign a_v_2"):
        evaluate(a1 - a2, {V1: 1})
    assert evaluate(a1 * a3 + 2, {V1: 3, V3: Fraction(1, 3)}) == 3
    assert evaluate(RatFunc.new(a3, a1 - a3), {V1: 2, V3: 1}) == 1


@axioms
@given(polynomials)
def test_evaluate_sums_terms(poly: MPoly) -> None:
    point = (Fraction(2), Fraction(-1, 3), Fraction(5))
    expected = Fraction(0)
    for monom, coeff in poly.terms():
        term = Fraction(int(coeff.numerator), int(coeff.denominator))
        for value, exponent in zip(point, monom):
            term *= value**exponent
        expected += term
    assert evaluate(poly, dict(zip((V1, V2, V3), point))) == expected


def _swapped(poly: MPoly) -> MPoly:
    terms = {(m[1], m[0], m[2]): c for m, c in poly.terms()}
    return RING.from_dict(terms)


@axioms
@given(polynomials)
def test_symmetrized_polynomials_are_invariant(poly: MPoly) -> None:
    assert is_invariant(poly + _swapped(poly), [(V1, V2)])
    antisymmetric = poly - _swapped(poly)
    assert is_invariant(antisymmetric, [(V1, V2)]) == antisymmetric.is_zero


def test_is_invariant() -> None:
    assert is_invariant(a1 + a2, [(V1, V2)])
    assert not is_invariant(a1 - a2, [(V1, V2)])
    assert is_invariant((a1 - a2) ** 2, [(V1, V2)])
    assert is_invariant(RatFunc.new(a3, (a1 - a2) ** 2), [(V1, V2)])
    assert not is_invariant(RatFunc.new(a3, a1 - a2), [(V1, V2)])
    assert is_invariant(a1 + a2 + a3, [(V1, V2), (V2, V3)])

    with pytest.raises(ValueError, match="mixes colors"):
        is_invariant(a1, [(V1, W1)])


def test_reduce_fraction_cancels_difference_forms() -> None:
    numer, denom = reduce_fraction(a1**2 - a2**2, 2 * (a1 - a2))
    assert numer == (a1 + a2) * QQ(1, 2)
    assert denom == 1

    x = RatFunc.new(RING.one, a2 - a1)
    assert x.numer == -1
    assert x.denom == a1 - a2


def test_reduce_fraction_full_gcd() -> None:
    numer = (a1**2 + a2**2) * (a1 + 2)
    denom = (a1 + 2) * a2
    assert RatFunc.new(numer, denom).denom == a1 * a2 + 2 * a2
    assert RatFunc.new(numer, denom, full_gcd=True).denom == a2

    with override_settings(ZASTAVA={"FULL_GCD": True}):
        assert RatFunc.new(numer, denom).denom == a2


def test_ratfunc_invariants() -> None:
    with pytest.raises(ZeroDivisionError):
        RatFunc.new(a1, RING.zero)
    with pytest.raises(AttributeError):
        RatFunc.new(a1).numer = a2  # type: ignore[misc]

    x = RatFunc.new(a1)
    assert x.is_polynomial
    assert x.as_poly() == a1
    assert not RatFunc.new(a1, a2).is_polynomial
    with pytest.raises(ValueError, match="not a polynomial"):
        RatFunc.new(a1, a2).as_poly()
    assert x != RatFunc.new(Ambient([W1]).gen(W1))


def test_linear_form() -> None:
    form = LinearForm(V2, V1)
    assert str(form) == "a_v_2 - a_v_1"
    assert -form == LinearForm(V1, V2)
    assert form.normalized() == (LinearForm(V1, V2), -1)
    assert form.to_poly(AMBIENT) == a2 - a1
    assert form.pair({V1: 3, V2: 5}) == 2

    with pytest.raises(ValueError, match="is zero"):
        LinearForm(V1, V1)


def test_linear_product() -> None:
    x = LinearProduct.of([(LinearForm(V2, V1), 1)])
    assert x.unit == -1
    assert x.factors == ((LinearForm(V1, V2), 1),)
    assert x.to_poly(AMBIENT) == a2 - a1

    y = LinearProduct.of([(LinearForm(V1, V2), 1), (LinearForm(V2, V1), 1)])
    assert y == LinearProduct.of([(LinearForm(V1, V2), 2)], unit=-1)
    assert str(y) == "-1*(a_v_1 - a_v_2)^2"

    assert (y / y).is_constant
    assert y / y == LinearProduct()
    assert (x**-1).expand(AMBIENT) == RatFunc.new(RING.one, a2 - a1)

    numer, denom = (x / LinearProduct.of([(LinearForm(V1, V3), 2)])).split()
    assert numer.to_poly(AMBIENT) == a2 - a1
    assert denom.to_poly(AMBIENT) == (a1 - a3) ** 2


def test_linear_product_evaluate() -> None:
    x = LinearProduct.of([(LinearForm(V1, V2), -1), (LinearForm(V1, V3), 2)], unit=3)
    assert x.evaluate({V1: 0, V2: 1, V3: 2}) == Fraction(-12)

    with pytest.raises(ZeroDivisionError):
        x.evaluate({V1: 1, V2: 1, V3: 2})
    with pytest.raises(ValueError, match="negative exponents"):
        x.to_poly(AMBIENT)
    with pytest.raises(ValueError, match="nonzero"):
        LinearProduct.of(unit=0)


linear_products = st.builds(
    lambda items, unit: LinearProduct.of(items, unit=unit),
    st.lists(
        st.tuples(
            st.sampled_from(
                [
                    LinearForm(V1, V2),
                    LinearForm(V2, V1),
                    LinearForm(V1, V3),
                    LinearForm(V3, V2),
                ]
            ),
            st.integers(-2, 2),
        ),
        max_size=4,
    ),
    st.integers(-3, 3).filter(bool),
)


@axioms
@given(linear_products)
def test_expand_matches_full_reduction(x: LinearProduct) -> None:
    numer, denom = (part.to_poly(AMBIENT) for part in x.split())
    reduced = RatFunc.new(numer, denom, full_gcd=True)
    expanded = x.expand(AMBIENT)
    assert expanded.numer == reduced.numer
    assert expanded.denom == reduced.denom


@pytest.mark.parametrize(
    "poly, text",
    (
        (RING.zero, "0"),
        (RING(3), "3"),
        ((a1 - a2) ** 2, "a_v_1^2 - 2*a_v_1*a_v_2 + a_v_2^2"),
        (-a1 + 3, "-a_v_1 + 3"),
        (a1 * QQ(1, 2) - a3, "1/2*a_v_1 - a_v_3"),
        (-a2 * a3 * QQ(2, 3), "-2/3*a_v_2*a_v_3"),
    ),
)
def test_poly_text(poly: object, text: str) -> None:
    assert poly_to_text(poly) == text
    assert poly_from_text(text, RING) == poly


def test_poly_from_text_errors() -> None:
    with pytest.raises(ValueError, match="Could not parse"):
        poly_from_text("a_v_1 +* 2", RING)
    with pytest.raises(ValueError, match="Could not parse"):
        poly_from_text("a_w_1", RING)
    with pytest.raises(ValueError, match="Could not parse"):
        poly_from_text("1/a_v_1", RING)


def test_ratfunc_text() -> None:
    assert str(RatFunc.new(RING.one, a1 - a2)) == "(1)/(a_v_1 - a_v_2)"
    assert str(RatFunc.new(a1 * 2, RING(4))) == "1/2*a_v_1"


def test_ambient() -> None:
    assert V1 in AMBIENT
    assert W1 not in AMBIENT
    assert AMBIENT == Ambient([V1, V2, V3])
    assert AMBIENT.const(Fraction(1, 2)) * 2 == 1
    with pytest.raises(ValueError, match="not declared"):
        AMBIENT.index(W1)
    with pytest.raises(ValueError, match="distinct"):
        Ambient([V1, V1])
