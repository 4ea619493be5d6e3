from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from zastava.divisorbase import ColoredSubset, subsets_of
from zastava.exactalg import LinearForm, LinearProduct, MPoly, RatFunc
from zastava.localspace import Relation, relation_pairs
from zastava.quiver import DimVector, Quiver, weights_of_N

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Cocharacter",
    "CoulombElement",
    "GenerationWitness",
    "coulomb_mul",
    "coulomb_relations",
    "d_exponent",
    "euler_class",
    "euler_factors",
    "fc_coefficient",
    "fc_factors",
    "localized_class",
    "multiplication_table",
    "rees_generation_witness",
    "rees_level",
]

logger = logging.getLogger(__name__)

Cocharacter = tuple[int, ...]


def d_exponent(k: int, l: int) -> int:  # noqa: E741
    if k * l >= 0:
        return 0
    return min(abs(k), abs(l))


def _check_cocharacter(alpha: DimVector, chi: Sequence[int]) -> None:
    if len(chi) != alpha.total:
        raise ValueError(
            "Cocharacter has %d entries, expected %d" % (len(chi), alpha.total)
        )


def fc_factors(
    quiver: Quiver,
    alpha: DimVector,
    lam: Sequence[int],
    mu: Sequence[int],
    *,
    orientation: Literal["source", "target"] = "source",
) -> LinearProduct:
    """
    The coefficient of ``r^(lam + mu)`` in ``r^lam * r^mu``: the product of
    ``xi ** d(xi(lam), xi(mu))`` over the weights ``xi`` of ``N``.
    """
    _check_cocharacter(alpha, lam)
    _check_cocharacter(alpha, mu)
    variables = alpha.variables()
    lam_at = dict(zip(variables, lam))
    mu_at = dict(zip(variables, mu))
    items: list[tuple[LinearForm, int]] = []
    for weight in weights_of_N(quiver, alpha, orientation=orientation):
        exponent = d_exponent(weight.pair(lam_at), weight.pair(mu_at))
        if exponent:
            items.append((weight, exponent))
    return LinearProduct.of(items)


def fc_coefficient(
    quiver: Quiver,
    alpha: DimVector,
    lam: Sequence[int],
    mu: Sequence[int],
) -> MPoly:
    return fc_factors(quiver, alpha, lam, mu).to_poly(alpha.ambient())


def rees_level(chi: Sequence[int]) -> int | None:
    """Filtration level of ``r^chi``, or ``None`` when ``chi`` is not positive."""
    if any(x < 0 for x in chi):
        return None
    return max(chi, default=0)


class CoulombElement:
    """
    A finite combination of the classes ``r^chi`` with rational function
    coefficients. With a Rees degree ``m`` set, the element lives in the
    ``m``-th graded piece and every ``chi`` must satisfy ``0 <= chi <= m``.
    """

    __slots__ = ("alpha", "quiver", "rees_degree", "terms")

    quiver: Quiver
    alpha: DimVector
    terms: Mapping[Cocharacter, RatFunc]
    rees_degree: int | None

    def __init__(
        self,
        quiver: Quiver,
        alpha: DimVector,
        terms: Iterable[tuple[Cocharacter, RatFunc]] = (),
        rees_degree: int | None = None,
    ) -> None:
        collected: dict[Cocharacter, RatFunc] = {}
        for chi, coeff in terms:
            chi = tuple(chi)
            _check_cocharacter(alpha, chi)
            collected[chi] = collected[chi] + coeff if chi in collected else coeff
        cleaned = {chi: c for chi, c in sorted(collected.items()) if not c.is_zero}
        if rees_degree is not None:
            if rees_degree < 0:
                raise ValueError("Rees degree must be nonnegative")
            for chi in cleaned:
                level = rees_level(chi)
                if level is None or level > rees_degree:
                    raise ValueError(
                        "r^%s does not lie in Rees degree %d" % (chi, rees_degree)
                    )
        object.__setattr__(self, "quiver", quiver)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "rees_degree", rees_degree)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("CoulombElement is immutable")

    @classmethod
    def monomial(
        cls,
        quiver: Quiver,
        alpha: DimVector,
        chi: Sequence[int],
        coeff: RatFunc | None = None,
        rees_degree: int | None = None,
    ) -> CoulombElement:
        if coeff is None:
            coeff = RatFunc.new(alpha.ambient().one)
        return cls(quiver, alpha, [(tuple(chi), coeff)], rees_degree)

    @classmethod
    def one(cls, quiver: Quiver, alpha: DimVector) -> CoulombElement:
        return cls.monomial(quiver, alpha, (0,) * alpha.total, rees_degree=0)

    def _check_ambient(self, other: CoulombElement) -> None:
        if self.quiver != other.quiver or self.alpha != other.alpha:
            raise ValueError("Elements belong to different Coulomb branches")

    def __iter__(self) -> Iterator[tuple[Cocharacter, RatFunc]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, chi: Sequence[int]) -> RatFunc:
        try:
            return self.terms[tuple(chi)]
        except KeyError:
            return RatFunc.new(self.alpha.ambient().zero)

    def __add__(self, other: CoulombElement) -> CoulombElement:
        self._check_ambient(other)
        if self.rees_degree != other.rees_degree:
            raise ValueError("Cannot add elements of different Rees degrees")
        return CoulombElement(
            self.quiver,
            self.alpha,
            [*self.terms.items(), *other.terms.items()],
            self.rees_degree,
        )

    def __neg__(self) -> CoulombElement:
        return self.scale(RatFunc.new(-self.alpha.ambient().one))

    def __sub__(self, other: CoulombElement) -> CoulombElement:
        return self + (-other)

    def __mul__(self, other: CoulombElement) -> CoulombElement:
        return coulomb_mul(self, other)

    def scale(self, factor: RatFunc) -> CoulombElement:
        return CoulombElement(
            self.quiver,
            self.alpha,
            [(chi, c * factor) for chi, c in self.terms.items()],
            self.rees_degree,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoulombElement):
            return NotImplemented
        return (
            self.quiver == other.quiver
            and self.alpha == other.alpha
            and self.rees_degree == other.rees_degree
            and self.terms.keys() == other.terms.keys()
            and all(c == other.terms[chi] for chi, c in self.terms.items())
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = " + ".join("(%s)*r^%s" % (c, list(chi)) for chi, c in self) or "0"
        if self.rees_degree is None:
            return "CoulombElement(%s)" % body
        return "CoulombElement(%s, rees_degree=%d)" % (body, self.rees_degree)


def coulomb_mul(x: CoulombElement, y: CoulombElement) -> CoulombElement:
    """
    Multiply by the rule ``r^lam * r^mu = fc(lam, mu) * r^(lam + mu)``,
    extended bilinearly. Rees degrees add when both are present.
    """
    x._check_ambient(y)
    ambient = x.alpha.ambient()
    terms = []
    for lam, a in x:
        for mu, b in y:
            fc = fc_factors(x.quiver, x.alpha, lam, mu).to_poly(ambient)
            chi = tuple(p + q for p, q in zip(lam, mu))
            terms.append((chi, a * b * fc))
    degree = None
    if x.rees_degree is not None and y.rees_degree is not None:
        degree = x.rees_degree + y.rees_degree
    return CoulombElement(x.quiver, x.alpha, terms, degree)


def euler_factors(alpha: DimVector, subset: ColoredSubset) -> LinearProduct:
    """Euler class at the fixed point of ``subset``, per color."""
    if subset.alpha != alpha:
        raise ValueError("Subset lives over a different index set")
    items = []
    for vertex in alpha.vertices:
        inside = [v for v in alpha.variables(vertex) if v in subset]
        outside = [v for v in alpha.variables(vertex) if v not in subset]
        items.extend((LinearForm(j, l), 1) for j in inside for l in outside)  # noqa: E741
    return LinearProduct.of(items)


def euler_class(alpha: DimVector, subset: ColoredSubset) -> MPoly:
    return euler_factors(alpha, subset).to_poly(alpha.ambient())


def localized_class(
    quiver: Quiver,
    alpha: DimVector,
    beta: DimVector,
) -> CoulombElement:
    """
    The sum over fixed points ``S`` with ``|S| = beta`` of
    ``Eu(S) ** -1 * r^chi(S)``, placed in Rees degree one.
    """
    ambient = alpha.ambient()
    terms = [
        (s.cocharacter(), (euler_factors(alpha, s) ** -1).expand(ambient))
        for s in subsets_of(alpha, beta)
    ]
    return CoulombElement(quiver, alpha, terms, rees_degree=1)


def coulomb_ratio(
    quiver: Quiver,
    A: ColoredSubset,
    B: ColoredSubset,
    *,
    orientation: Literal["source", "target"] = "source",
) -> LinearProduct:
    """
    The factor ``c`` in ``x^A x^B = c * x^(A|B) x^(A&B)`` for the normalized
    degree-one classes ``x^S = Eu(S) ** -1 * r^chi(S)``.
    """
    alpha = A.alpha
    union, meet = A | B, A & B

    def fc(s: ColoredSubset, t: ColoredSubset) -> LinearProduct:
        return fc_factors(
            quiver, alpha, s.cocharacter(), t.cocharacter(), orientation=orientation
        )

    def eu(s: ColoredSubset) -> LinearProduct:
        return euler_factors(alpha, s)

    return (fc(A, B) / fc(union, meet)) * (eu(union) * eu(meet) / (eu(A) * eu(B)))


def coulomb_relations(quiver: Quiver, alpha: DimVector) -> list[Relation]:
    """
    Quadratic relations among the degree-one generators ``x^chi(S)``, with
    the same pair enumeration as the locality relations.
    """
    return [
        Relation.from_ratio(a, b, coulomb_ratio(quiver, a, b))
        for a, b in relation_pairs(alpha)
    ]


def multiplication_table(quiver: Quiver, alpha: DimVector) -> list[list[MPoly]]:
    """``fc(chi(S), chi(T))`` for all subsets, rows and columns ordered by mask."""
    subsets = subsets_of(alpha)
    return [
        [
            fc_coefficient(quiver, alpha, s.cocharacter(), t.cocharacter())
            for t in subsets
        ]
        for s in subsets
    ]


@dataclass(frozen=True)
class GenerationWitness:
    chain: tuple[ColoredSubset, ...]
    product: CoulombElement

    @property
    def coefficient(self) -> RatFunc:
        ((_, coeff),) = self.product
        return coeff


def rees_generation_witness(
    quiver: Quiver,
    alpha: DimVector,
    chi: Sequence[int],
) -> GenerationWitness:
    """
    Write a positive ``chi`` of level ``m`` as ``chi(S_1) + ... + chi(S_m)``
    with ``S_1 >= ... >= S_m`` and multiply the matching degree-one classes.
    The product is a nonzero multiple of ``r^chi`` in Rees degree ``m``.
    """
    _check_cocharacter(alpha, chi)
    level = rees_level(chi)
    if level is None:
        raise ValueError("Cocharacter %s is not positive" % list(chi))
    masks = [
        sum(1 << p for p, x in enumerate(chi) if x >= k) for k in range(1, level + 1)
    ]
    chain = tuple(ColoredSubset.from_mask(alpha, m) for m in masks)
    ambient = alpha.ambient()
    product = CoulombElement.one(quiver, alpha)
    for s in chain:
        generator = CoulombElement.monomial(
            quiver,
            alpha,
            s.cocharacter(),
            (euler_factors(alpha, s) ** -1).expand(ambient),
            rees_degree=1,
        )
        product = product * generator
    logger.debug(
        "Level %d cocharacter %s factors through %d subsets", level, chi, len(chain)
    )
    return GenerationWitness(chain, product)
