from __future__ import annotations

import itertools
import logging
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Literal, Union

from zastava.conf import app_settings
from zastava.divisorbase import ColoredSubset, subsets_of
from zastava.exactalg import LinearForm, LinearProduct, MPoly, RatFunc, Variable
from zastava.quiver import DimVector, Quiver, SymMatrix

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "Binomial",
    "Relation",
    "affine_chart_relations",
    "local_factor",
    "local_factor_Q",
    "local_factor_product",
    "local_factor_product_Q",
    "locality_relations",
    "relation_pairs",
    "segre_equations",
    "segre_point",
]

logger = logging.getLogger(__name__)

Source = Union[SymMatrix, Quiver]


def _cross_pairs(
    subset: ColoredSubset,
    source: str,
    target: str,
) -> Iterator[LinearForm]:
    for l in subset.part(source):  # noqa: E741
        for j in subset.part(target):
            yield LinearForm(Variable(source, l), Variable(target, j))


def _same_color_pairs(subset: ColoredSubset, vertex: str) -> Iterator[LinearForm]:
    for l, j in itertools.permutations(subset.part(vertex), 2):  # noqa: E741
        yield LinearForm(Variable(vertex, l), Variable(vertex, j))


def local_factor_product(kappa: SymMatrix, subset: ColoredSubset) -> LinearProduct:
    if kappa.vertices != subset.alpha.vertices:
        raise ValueError("Matrix and subset use different vertex orders")
    items: list[tuple[LinearForm, int]] = []
    vertices = kappa.vertices
    for p, i in enumerate(vertices):
        items.extend((form, kappa[i, i]) for form in _same_color_pairs(subset, i))
        for q in range(p + 1, len(vertices)):
            j = vertices[q]
            items.extend((form, kappa[i, j]) for form in _cross_pairs(subset, i, j))
    return LinearProduct.of(items)


def local_factor_product_Q(
    quiver: Quiver,
    subset: ColoredSubset,
    *,
    orientation: Literal["source", "target"] = "source",
) -> LinearProduct:
    """
    Like :func:`local_factor_product` but cross-color pairs are taken once per
    arrow, as ``(a_s_l - a_t_j) ** -1`` for an arrow ``s -> t``.
    """
    if quiver.vertices != subset.alpha.vertices:
        raise ValueError("Quiver and subset use different vertex orders")
    items: list[tuple[LinearForm, int]] = []
    for vertex in quiver.vertices:
        exponent = 1 - quiver.loops(vertex)
        items.extend((form, exponent) for form in _same_color_pairs(subset, vertex))
    for source, target in quiver.edges:
        if source == target:
            continue
        for form in _cross_pairs(subset, source, target):
            items.append((form if orientation == "source" else -form, -1))
    return LinearProduct.of(items)


def local_factor(kappa: SymMatrix, alpha: DimVector, subset: ColoredSubset) -> RatFunc:
    return local_factor_product(kappa, subset).expand(alpha.ambient())


def local_factor_Q(quiver: Quiver, alpha: DimVector, subset: ColoredSubset) -> RatFunc:
    return local_factor_product_Q(quiver, subset).expand(alpha.ambient())


def _factor(
    source: Source,
    subset: ColoredSubset,
    orientation: Literal["source", "target"],
) -> LinearProduct:
    if isinstance(source, Quiver):
        return local_factor_product_Q(source, subset, orientation=orientation)
    return local_factor_product(source, subset)


@dataclass(frozen=True)
class Relation:
    """
    The quadratic relation ``lhs * s^A s^B = rhs * s^(A|B) s^(A&B)`` with
    coprime polynomial coefficients.
    """

    A: ColoredSubset
    B: ColoredSubset
    lhs: MPoly
    rhs: MPoly

    @property
    def union(self) -> ColoredSubset:
        return self.A | self.B

    @property
    def intersection(self) -> ColoredSubset:
        return self.A & self.B

    @property
    def alpha(self) -> DimVector:
        return self.A.alpha

    @classmethod
    def from_ratio(
        cls,
        A: ColoredSubset,
        B: ColoredSubset,
        ratio: LinearProduct,
    ) -> Relation:
        """
        Clear denominators in ``s^A s^B = ratio * s^(A|B) s^(A&B)``. The
        unit of ``ratio`` stays on the right-hand side.
        """
        ambient = A.alpha.ambient()
        numer, denom = ratio.split()
        return cls(A, B, denom.to_poly(ambient), numer.to_poly(ambient))

    def ratio(self) -> RatFunc:
        return RatFunc.new(self.rhs, self.lhs)

    def generators(self) -> tuple[int, int, int, int]:
        return (self.A.mask, self.B.mask, self.union.mask, self.intersection.mask)


def relation_pairs(alpha: DimVector) -> list[tuple[ColoredSubset, ColoredSubset]]:
    """Unordered pairs of incomparable subsets, ordered by their masks."""
    subsets = subsets_of(alpha)
    return [
        (a, b)
        for a, b in itertools.combinations(subsets, 2)
        if not (a <= b or b <= a)
    ]


def locality_relations(
    source: Source,
    alpha: DimVector,
    *,
    orientation: Literal["source", "target"] = "source",
) -> list[Relation]:
    """
    The locality relations ``s^A s^B / l(A) l(B) = s^U s^I / l(U) l(I)`` for
    ``U = A | B`` and ``I = A & B``, cleared of denominators. ``source`` is a
    symmetric matrix or a quiver; quivers use the arrow-wise local factor.
    """
    if source.vertices != alpha.vertices:
        raise ValueError("Dimension vector is not aligned with the vertices")
    cache: dict[int, LinearProduct] = {}

    def factor(subset: ColoredSubset) -> LinearProduct:
        if subset.mask not in cache:
            cache[subset.mask] = _factor(source, subset, orientation)
        return cache[subset.mask]

    relations = []
    for a, b in relation_pairs(alpha):
        ratio = factor(a) * factor(b) / (factor(a | b) * factor(a & b))
        relations.append(Relation.from_ratio(a, b, ratio))
    logger.debug("Built %d locality relations for %s", len(relations), alpha)
    return relations


@dataclass(frozen=True, order=True)
class Binomial:
    """
    ``prod z_left = prod z_right`` where generators are named by the bitmask
    of their index subset. Both sides are sorted tuples of masks.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def of(cls, left: Iterable[int], right: Iterable[int]) -> Binomial:
        sides = sorted([tuple(sorted(left)), tuple(sorted(right))])
        return cls(sides[0], sides[1])

    def __str__(self) -> str:
        return "%s = %s" % (
            "*".join("z_%d" % m for m in self.left) or "1",
            "*".join("z_%d" % m for m in self.right) or "1",
        )

    def residual(self, values: Mapping[int, Fraction]) -> Fraction:
        lhs, rhs = Fraction(1), Fraction(1)
        for m in self.left:
            lhs *= values[m]
        for m in self.right:
            rhs *= values[m]
        return lhs - rhs


def _sum_vector(n: int, x: int, y: int) -> tuple[int, ...]:
    return tuple((x >> p & 1) + (y >> p & 1) for p in range(n))


def segre_equations(n: int) -> list[Binomial]:
    """
    All ``z_X z_Y = z_U z_V`` over subsets of an ``n``-element set with
    ``X + Y = U + V`` as multisets and ``{X, Y} != {U, V}``.
    """
    if n < 0:
        raise ValueError("Set size must be nonnegative")
    if n > app_settings.SEGRE_LIMIT:
        raise ValueError(
            "Set size %d exceeds SEGRE_LIMIT (%d)" % (n, app_settings.SEGRE_LIMIT)
        )
    groups: defaultdict[tuple[int, ...], list[tuple[int, int]]] = defaultdict(list)
    for x, y in itertools.combinations_with_replacement(range(1 << n), 2):
        groups[_sum_vector(n, x, y)].append((x, y))
    equations = {
        Binomial.of(first, second)
        for pairs in groups.values()
        for first, second in itertools.combinations(pairs, 2)
    }
    return sorted(equations)


def affine_chart_relations(n: int) -> list[Binomial]:
    """
    On the chart ``z_0 != 0`` every generator is a product of the singleton
    ones: ``z_X * z_0^(|X|-1) = prod z_p`` for each ``X`` with ``|X| >= 2``.
    """
    if n < 0:
        raise ValueError("Set size must be nonnegative")
    relations = []
    for mask in range(1 << n):
        points = [1 << p for p in range(n) if mask >> p & 1]
        if len(points) >= 2:  # noqa: PLR2004
            relations.append(
                Binomial.of((mask, *[0] * (len(points) - 1)), points)
            )
    return relations


def segre_point(
    coordinates: Sequence[tuple[Fraction, Fraction]],
) -> dict[int, Fraction]:
    """
    Image of a point of ``(P^1)^n`` under the Segre map: ``z_X`` is the
    product of the second coordinate over ``X`` and the first one elsewhere.
    """
    n = len(coordinates)
    values = {}
    for mask in range(1 << n):
        value = Fraction(1)
        for p, (x, y) in enumerate(coordinates):
            value *= y if mask >> p & 1 else x
        values[mask] = value
    return values
