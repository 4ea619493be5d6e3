from __future__ import annotations

import itertools
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import lex
from sympy.polys.rings import PolyRing

from zastava.conf import app_settings
from zastava.exactalg import (
    LinearForm,
    LinearProduct,
    MPoly,
    Variable,
    elementary,
    evaluate,
    to_ground,
)
from zastava.quiver import DimVector

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "CertificationError",
    "ColoredSubset",
    "GrPresentation",
    "basis_matrix",
    "diagonal_divisor_pullback",
    "global_basis",
    "gr_presentation",
    "gr_restrict_regular",
    "restrict_poly",
    "sample_regular_point",
    "subsets_of",
]

logger = logging.getLogger(__name__)


class CertificationError(RuntimeError):
    """No sampled point certified the requested basis."""


@dataclass(frozen=True)
class ColoredSubset:
    """
    A subset of the colored index set of ``alpha``: one sorted tuple of slots
    per vertex, aligned with the vertex order of ``alpha``.
    """

    alpha: DimVector
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.parts) != len(self.alpha.entries):
            raise ValueError("Subset must have one part per vertex")
        for (vertex, n), part in zip(self.alpha, self.parts):
            if tuple(sorted(set(part))) != part:
                raise ValueError("Slots at %s must be sorted and distinct" % vertex)
            if part and (part[0] < 1 or part[-1] > n):
                raise ValueError("Slots at %s must lie in 1..%d" % (vertex, n))

    @classmethod
    def of(
        cls,
        alpha: DimVector,
        mapping: Mapping[str, Iterable[int]],
    ) -> ColoredSubset:
        unknown = set(mapping) - set(alpha.vertices)
        if unknown:
            raise ValueError("Unknown vertices: %s" % ", ".join(sorted(unknown)))
        return cls(
            alpha,
            tuple(tuple(sorted(set(mapping.get(v, ())))) for v in alpha.vertices),
        )

    @classmethod
    def from_mask(cls, alpha: DimVector, mask: int) -> ColoredSubset:
        if not 0 <= mask < 1 << alpha.total:
            raise ValueError("Mask %d out of range for %s" % (mask, alpha))
        parts, offset = [], 0
        for _, n in alpha:
            slots = range(1, n + 1)
            parts.append(tuple(s for s in slots if mask >> (offset + s - 1) & 1))
            offset += n
        return cls(alpha, tuple(parts))

    @classmethod
    def empty(cls, alpha: DimVector) -> ColoredSubset:
        return cls(alpha, tuple(() for _ in alpha.entries))

    @classmethod
    def full(cls, alpha: DimVector) -> ColoredSubset:
        return cls(alpha, tuple(tuple(range(1, n + 1)) for _, n in alpha))

    @property
    def mask(self) -> int:
        """Index of the subset: bit ``k`` marks the ``k``-th slot overall."""
        value, offset = 0, 0
        for (_, n), part in zip(self.alpha, self.parts):
            for slot in part:
                value |= 1 << (offset + slot - 1)
            offset += n
        return value

    def part(self, vertex: str) -> tuple[int, ...]:
        return self.parts[self.alpha.vertices.index(vertex)]

    def __len__(self) -> int:
        return sum(len(part) for part in self.parts)

    def __iter__(self) -> Iterator[Variable]:
        for vertex, part in zip(self.alpha.vertices, self.parts):
            for slot in part:
                yield Variable(vertex, slot)

    def __contains__(self, variable: object) -> bool:
        if not isinstance(variable, Variable):
            return False
        try:
            return variable.slot in self.part(variable.color)
        except ValueError:
            return False

    def _combine(self, other: ColoredSubset, op: str) -> ColoredSubset:
        if self.alpha != other.alpha:
            raise ValueError("Subsets of different index sets")
        mask = {"or": self.mask | other.mask, "and": self.mask & other.mask}.get(
            op, self.mask & ~other.mask
        )
        return ColoredSubset.from_mask(self.alpha, mask)

    def __or__(self, other: ColoredSubset) -> ColoredSubset:
        return self._combine(other, "or")

    def __and__(self, other: ColoredSubset) -> ColoredSubset:
        return self._combine(other, "and")

    def __sub__(self, other: ColoredSubset) -> ColoredSubset:
        return self._combine(other, "sub")

    def __le__(self, other: ColoredSubset) -> bool:
        return self._combine(other, "sub").mask == 0

    def complement(self) -> ColoredSubset:
        return ColoredSubset.full(self.alpha) - self

    @property
    def size(self) -> DimVector:
        return DimVector(
            tuple((v, len(part)) for v, part in zip(self.alpha.vertices, self.parts))
        )

    def cocharacter(self) -> tuple[int, ...]:
        """The 0/1 cocharacter of the subset over the flattened slot order."""
        return tuple(1 if v in self else 0 for v in self.alpha.variables())

    def to_json(self) -> dict[str, list[int]]:
        return {v: list(part) for v, part in zip(self.alpha.vertices, self.parts)}

    def __str__(self) -> str:
        if len(self.alpha.entries) == 1:
            return "{%s}" % ",".join(str(s) for s in self.parts[0])
        return "{%s}" % ",".join("%s:%d" % (v.color, v.slot) for v in self)


def subsets_of(alpha: DimVector, beta: DimVector | None = None) -> list[ColoredSubset]:
    """All colored subsets (of size ``beta`` when given), ordered by mask."""
    if beta is not None and not beta <= alpha:
        raise ValueError("%s is not bounded by %s" % (beta, alpha))
    subsets = [ColoredSubset.from_mask(alpha, m) for m in range(1 << alpha.total)]
    if beta is None:
        return subsets
    return [s for s in subsets if s.size == beta]


def diagonal_divisor_pullback(i: str, j: str, alpha: DimVector) -> MPoly:
    """
    Pullback to the coordinates of the diagonal divisor between colors
    ``i`` and ``j``.
    """
    ambient = alpha.ambient()
    if i == j:
        pairs = itertools.permutations(alpha.variables(i), 2)
    else:
        pairs = itertools.product(alpha.variables(i), alpha.variables(j))
    return LinearProduct.of((LinearForm(x, y), 1) for x, y in pairs).to_poly(ambient)


@dataclass(frozen=True)
class GrPresentation:
    """
    Generators ``c_<i>_<l>`` and ``d_<i>_<j>`` over the coordinate ring, with
    one relation per vertex ``i`` and degree ``1 <= s <= n_i``.
    """

    alpha: DimVector
    beta: DimVector
    ring: PolyRing
    relations: tuple[MPoly, ...]

    @property
    def rank(self) -> int:
        pairs = zip(self.alpha, self.beta)
        return math.prod(math.comb(n, k) for (_, n), (_, k) in pairs)

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(str(s) for s in self.ring.symbols[self.alpha.total :])

    def gen(self, name: str) -> MPoly:
        names = [str(s) for s in self.ring.symbols]
        try:
            return self.ring.gens[names.index(name)]
        except ValueError:
            raise ValueError("Unknown generator %s" % name) from None

    def c(self, vertex: str, l: int) -> MPoly:  # noqa: E741
        return self.gen("c_%s_%d" % (vertex, l))

    def d(self, vertex: str, j: int) -> MPoly:
        return self.gen("d_%s_%d" % (vertex, j))


def gr_presentation(alpha: DimVector, beta: DimVector) -> GrPresentation:
    if not beta <= alpha:
        raise ValueError("%s is not bounded by %s" % (beta, alpha))
    names = [v.name for v in alpha.variables()]
    for (vertex, n), (_, k) in zip(alpha, beta):
        names.extend("c_%s_%d" % (vertex, l) for l in range(1, k + 1))
        names.extend("d_%s_%d" % (vertex, j) for j in range(1, n - k + 1))
    ring = PolyRing(",".join(names), QQ, lex)
    a = dict(zip(names, ring.gens))

    relations = []
    for (vertex, n), (_, k) in zip(alpha, beta):
        c = [ring.one] + [a["c_%s_%d" % (vertex, l)] for l in range(1, k + 1)]
        d = [ring.one] + [a["d_%s_%d" % (vertex, j)] for j in range(1, n - k + 1)]
        coords = [a[v.name] for v in alpha.variables(vertex)]
        for s in range(1, n + 1):
            lhs = sum(
                (c[l] * d[s - l] for l in range(max(0, s - (n - k)), min(k, s) + 1)),
                ring.zero,
            )
            relations.append(lhs - elementary(s, coords, ring.one))
    return GrPresentation(alpha, beta, ring, tuple(relations))


def _images(presentation: GrPresentation, subset: ColoredSubset) -> list[MPoly]:
    """Images of the ``c`` and ``d`` generators, in generator order."""
    alpha, beta = presentation.alpha, presentation.beta
    if subset.alpha != alpha:
        raise ValueError("Subset lives over a different index set")
    if subset.size != beta:
        raise ValueError("Subset %s does not have size %s" % (subset, beta))
    gen, one = presentation.gen, presentation.ring.one
    images = []
    for (vertex, n), (_, k) in zip(alpha, beta):
        inside = [gen(v.name) for v in alpha.variables(vertex) if v in subset]
        outside = [gen(v.name) for v in alpha.variables(vertex) if v not in subset]
        images.extend(elementary(l, inside, one) for l in range(1, k + 1))
        images.extend(elementary(j, outside, one) for j in range(1, n - k + 1))
    return images


def restrict_poly(
    presentation: GrPresentation,
    poly: MPoly,
    subset: ColoredSubset,
) -> MPoly:
    """Image of ``poly`` in the component of the regular part indexed by ``subset``."""
    ring = presentation.ring
    images = _images(presentation, subset)
    generators = ring.gens[presentation.alpha.total :]
    restricted = poly.compose(list(zip(generators, images)))
    return restricted.set_ring(presentation.alpha.ambient().ring)


def gr_restrict_regular(
    presentation: GrPresentation,
    generator: str,
    subset: ColoredSubset,
) -> MPoly:
    return restrict_poly(presentation, presentation.gen(generator), subset)


def sample_regular_point(
    alpha: DimVector,
    rng: random.Random,
) -> dict[Variable, Fraction]:
    """
    Draw integer coordinates from ``0..SAMPLE_SCALE * |alpha|``, rejecting
    draws where two coordinates coincide.
    """
    variables = alpha.variables()
    high = max(app_settings.SAMPLE_SCALE * len(variables), len(variables))
    while True:
        values = [rng.randint(0, high) for _ in variables]
        if len(set(values)) == len(values):
            return {v: Fraction(x) for v, x in zip(variables, values)}
        logger.debug("Rejected non-regular sample %s", values)


def _c_monomials(presentation: GrPresentation, vertex: str) -> list[MPoly]:
    k = presentation.beta[vertex]
    n = presentation.alpha[vertex]
    bound = k * (n - k)
    gens = [presentation.c(vertex, l) for l in range(1, k + 1)]
    exponents = itertools.product(*(range(bound // l + 1) for l in range(1, k + 1)))
    admissible = [
        e for e in exponents if sum(l * x for l, x in zip(range(1, k + 1), e)) <= bound
    ]
    admissible.sort(key=lambda e: (sum(l * x for l, x in enumerate(e, 1)), e[::-1]))
    return [
        math.prod((g**x for g, x in zip(gens, e)), start=presentation.ring.one)
        for e in admissible
    ]


def _evaluation_row(
    presentation: GrPresentation,
    monomial: MPoly,
    subsets: Sequence[ColoredSubset],
    point: Mapping[Variable, Fraction],
) -> list[Fraction]:
    return [evaluate(restrict_poly(presentation, monomial, s), point) for s in subsets]


def _matrix(rows: Sequence[Sequence[Fraction]]) -> DomainMatrix:
    width = len(rows[0]) if rows else 0
    return DomainMatrix(
        [[to_ground(x) for x in row] for row in rows], (len(rows), width), QQ
    )


def _greedy_family(
    presentation: GrPresentation,
    vertex: str,
    point: Mapping[Variable, Fraction],
) -> list[MPoly]:
    local = gr_presentation(
        DimVector(((vertex, presentation.alpha[vertex]),)),
        DimVector(((vertex, presentation.beta[vertex]),)),
    )
    subsets = subsets_of(local.alpha, local.beta)
    family: list[MPoly] = []
    rows: list[list[Fraction]] = []
    for monomial in _c_monomials(local, vertex):
        row = _evaluation_row(local, monomial, subsets, point)
        if _matrix([*rows, row]).rank() > len(rows):
            family.append(monomial.set_ring(presentation.ring))
            rows.append(row)
            if len(family) == local.rank:
                break
    return family


def basis_matrix(
    presentation: GrPresentation,
    basis: Sequence[MPoly],
) -> list[list[MPoly]]:
    """Rows: basis elements; columns: components indexed by size-beta subsets."""
    subsets = subsets_of(presentation.alpha, presentation.beta)
    return [[restrict_poly(presentation, b, s) for s in subsets] for b in basis]


def global_basis(
    alpha: DimVector,
    beta: DimVector,
    *,
    seed: int | None = None,
) -> list[MPoly]:
    """
    Pick ``prod C(n_i, k_i)`` monomials in the ``c`` generators whose images
    in the regular components form an invertible matrix.

    Per vertex, monomials are scanned by weighted degree and kept while they
    raise the rank at a sampled regular point; the product family is then
    certified at an independent point.

    :raises CertificationError: When ``CERTIFY_ATTEMPTS`` points all fail.
    """
    presentation = gr_presentation(alpha, beta)
    rng = random.Random(app_settings.SEED if seed is None else seed)
    subsets = subsets_of(alpha, beta)
    for attempt in range(1, app_settings.CERTIFY_ATTEMPTS + 1):
        point = sample_regular_point(alpha, rng)
        families = [_greedy_family(presentation, v, point) for v in alpha.vertices]
        basis = [
            math.prod(combo, start=presentation.ring.one)
            for combo in itertools.product(*families)
        ]
        if len(basis) == presentation.rank:
            check = sample_regular_point(alpha, rng)
            rows = [_evaluation_row(presentation, b, subsets, check) for b in basis]
            if _matrix(rows).det() != 0:
                return basis
        logger.info(
            "Basis certification for alpha=%s beta=%s failed on attempt %d",
            alpha,
            beta,
            attempt,
        )
    raise CertificationError(
        "Could not certify a basis for alpha=%s beta=%s after %d points"
        % (alpha, beta, app_settings.CERTIFY_ATTEMPTS)
    )
