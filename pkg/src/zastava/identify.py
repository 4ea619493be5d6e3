from __future__ import annotations

import itertools
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Literal, Optional

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from zastava import conf
from zastava.conf import app_settings
from zastava.coulomb import coulomb_ratio
from zastava.divisorbase import ColoredSubset, subsets_of
from zastava.exactalg import evaluate, to_ground
from zastava.localspace import (
    Relation,
    local_factor_product_Q,
    segre_equations,
)
from zastava.utils import chunked

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence

    from zastava.exactalg import LinearProduct, RatFunc, Variable
    from zastava.quiver import DimVector, Quiver

__all__ = [
    "FiberRelation",
    "IdentityCheck",
    "IdentityFailure",
    "IdentityReport",
    "SegreVerdict",
    "SuppVerdict",
    "check_identity",
    "compare_with_segre",
    "diagnose_sign",
    "segre_scaling",
    "specialize_fiber",
    "supp_oracle",
    "verify_all",
]

logger = logging.getLogger(__name__)

Orientation = Literal["source", "target"]
Repair = Optional[Literal["weights", "local_factor"]]

CHUNK_SIZE = 64


@dataclass(frozen=True)
class IdentityCheck:
    """
    Both sides of the identity for one pair, as products of difference forms.
    Such products factor uniquely, so they are compared without expanding;
    ``lhs`` and ``rhs`` give the expanded rational functions.
    """

    A: ColoredSubset
    B: ColoredSubset
    coulomb: LinearProduct
    local: LinearProduct

    @property
    def holds(self) -> bool:
        return self.coulomb == self.local

    @cached_property
    def lhs(self) -> RatFunc:
        return self.coulomb.expand(self.A.alpha.ambient())

    @cached_property
    def rhs(self) -> RatFunc:
        return self.local.expand(self.A.alpha.ambient())

    def __bool__(self) -> bool:
        return self.holds


def check_identity(
    quiver: Quiver,
    alpha: DimVector,
    A: ColoredSubset,
    B: ColoredSubset,
    *,
    weights: Orientation = "source",
    local_factor: Orientation = "source",
) -> IdentityCheck:
    """
    Compare the Coulomb side ``fc(A,B)/fc(A|B,A&B) * Eu(A|B)Eu(A&B)/(Eu(A)Eu(B))``
    with the local side ``l_Q(A)l_Q(B)/(l_Q(A|B)l_Q(A&B))``, both expanded to
    reduced rational functions on demand.
    """
    if A.alpha != alpha or B.alpha != alpha:
        raise ValueError("Subsets live over a different index set")
    l_A, l_B, l_U, l_I = (
        local_factor_product_Q(quiver, s, orientation=local_factor)
        for s in (A, B, A | B, A & B)
    )
    lhs = coulomb_ratio(quiver, A, B, orientation=weights)
    rhs = l_A * l_B / (l_U * l_I)
    return IdentityCheck(A, B, lhs, rhs)


@dataclass(frozen=True)
class IdentityFailure:
    A: ColoredSubset
    B: ColoredSubset
    lhs: str
    rhs: str


@dataclass
class IdentityReport:
    quiver: Quiver
    alpha: DimVector
    pairs: int = 0
    failures: list[IdentityFailure] = field(default_factory=list)
    elapsed: float | None = None
    repair: Repair = None

    @property
    def passed(self) -> bool:
        return not self.failures


def _check_chunk(
    quiver: Quiver,
    alpha: DimVector,
    chunk: Sequence[tuple[int, int]],
    weights: Orientation,
    local_factor: Orientation,
) -> list[tuple[int, int, str, str]]:
    failures = []
    for a, b in chunk:
        result = check_identity(
            quiver,
            alpha,
            ColoredSubset.from_mask(alpha, a),
            ColoredSubset.from_mask(alpha, b),
            weights=weights,
            local_factor=local_factor,
        )
        if not result.holds:
            failures.append((a, b, str(result.lhs), str(result.rhs)))
    return failures


def _init_worker(overrides: dict[str, Any]) -> None:
    conf.configure(**overrides)


def verify_all(
    quiver: Quiver,
    alpha: DimVector,
    *,
    threads: int | None = None,
    weights: Orientation = "source",
    local_factor: Orientation = "source",
    diagnose: bool = False,
) -> IdentityReport:
    """
    Check the identity for every unordered pair of colored subsets, the
    diagonal included. Pairs are split in chunks and spread over up to
    ``threads`` worker processes; the report does not depend on the split.

    :param diagnose: On failure, find out which sign flip repairs all pairs.
    """
    if threads is None:
        threads = app_settings.THREADS
    started = time.perf_counter()
    masks = [s.mask for s in subsets_of(alpha)]
    pairs = list(itertools.combinations_with_replacement(masks, 2))
    chunks = list(chunked(pairs, CHUNK_SIZE))
    workers = max(1, min(threads, len(chunks)))
    logger.info("Checking %d pairs for %s on %d worker(s)", len(pairs), alpha, workers)

    n = len(chunks)
    columns = ([quiver] * n, [alpha] * n, chunks, [weights] * n, [local_factor] * n)
    if workers == 1:
        results = list(map(_check_chunk, *columns))
    else:
        with ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_worker,
            initargs=(conf.snapshot(),),
        ) as executor:
            results = list(executor.map(_check_chunk, *columns))

    report = IdentityReport(quiver, alpha, pairs=len(pairs))
    for a, b, lhs, rhs in itertools.chain.from_iterable(results):
        report.failures.append(
            IdentityFailure(
                ColoredSubset.from_mask(alpha, a),
                ColoredSubset.from_mask(alpha, b),
                lhs,
                rhs,
            )
        )
    if report.failures:
        logger.warning(
            "%d of %d pairs fail for %s", len(report.failures), len(pairs), alpha
        )
        if diagnose:
            report.repair = diagnose_sign(
                quiver,
                alpha,
                threads=threads,
                weights=weights,
                local_factor=local_factor,
            )
    report.elapsed = time.perf_counter() - started
    return report


def _flip(orientation: Orientation) -> Orientation:
    return "target" if orientation == "source" else "source"


def diagnose_sign(
    quiver: Quiver,
    alpha: DimVector,
    *,
    threads: int | None = None,
    weights: Orientation = "source",
    local_factor: Orientation = "source",
) -> Repair:
    """
    Find the single sign flip (weight orientation or arrow direction in the
    local factor) under which every pair satisfies the identity, starting
    from the given conventions.
    """
    flipped = verify_all(
        quiver,
        alpha,
        threads=threads,
        weights=_flip(weights),
        local_factor=local_factor,
    )
    if flipped.passed:
        logger.info("Flipping the weights repairs all pairs for %s", alpha)
        return "weights"
    flipped = verify_all(
        quiver,
        alpha,
        threads=threads,
        weights=weights,
        local_factor=_flip(local_factor),
    )
    if flipped.passed:
        logger.info("Flipping the local factor repairs all pairs for %s", alpha)
        return "local_factor"
    return None


PairLedger = Counter[tuple[int, int]]


@dataclass(frozen=True)
class SuppVerdict:
    """Per-color signed multisets of index pairs and the expected answer."""

    euler: dict[str, PairLedger]
    local: dict[str, PairLedger]
    expected: dict[str, PairLedger]

    @property
    def holds(self) -> bool:
        return self.euler == self.expected and self.local == self.expected

    def __bool__(self) -> bool:
        return self.holds


def _ledger(plus: Sequence[PairLedger], minus: Sequence[PairLedger]) -> PairLedger:
    total: PairLedger = Counter()
    for counter in plus:
        total.update(counter)
    for counter in minus:
        total.subtract(counter)
    return Counter({k: v for k, v in total.items() if v})


def _euler_support(subset: ColoredSubset, vertex: str) -> PairLedger:
    inside = subset.part(vertex)
    outside = [s for s in subset.alpha.slots(vertex) if s not in inside]
    return Counter(itertools.product(inside, outside))


def _local_support(subset: ColoredSubset, vertex: str) -> PairLedger:
    return Counter(itertools.permutations(subset.part(vertex), 2))


def supp_oracle(
    quiver: Quiver,
    alpha: DimVector,
    A: ColoredSubset,
    B: ColoredSubset,
) -> SuppVerdict:
    """
    Decide the identity for an edge-free quiver by bookkeeping alone: per
    color, ``Eu(A)Eu(B)/(Eu(A|B)Eu(A&B))`` and ``l(A|B)l(A&B)/(l(A)l(B))``
    are tracked as signed multisets of ordered slot pairs, and both must
    equal ``(C x E) + (E x C)`` with ``C = A - B`` and ``E = B - A``.
    """
    if not quiver.is_edge_free:
        raise ValueError("The multiset calculus only applies to edge-free quivers")
    union, meet = A | B, A & B
    euler, local, expected = {}, {}, {}
    for vertex in alpha.vertices:
        euler[vertex] = _ledger(
            [_euler_support(A, vertex), _euler_support(B, vertex)],
            [_euler_support(union, vertex), _euler_support(meet, vertex)],
        )
        local[vertex] = _ledger(
            [_local_support(union, vertex), _local_support(meet, vertex)],
            [_local_support(A, vertex), _local_support(B, vertex)],
        )
        c = (A - B).part(vertex)
        e = (B - A).part(vertex)
        expected[vertex] = Counter(
            [*itertools.product(c, e), *itertools.product(e, c)]
        )
    return SuppVerdict(euler, local, expected)


@dataclass(frozen=True)
class FiberRelation:
    """A locality relation with its coefficients evaluated at a point."""

    relation: Relation
    lhs: Fraction
    rhs: Fraction

    @property
    def degenerate(self) -> bool:
        return self.lhs == 0 or self.rhs == 0


def specialize_fiber(
    relations: Sequence[Relation],
    point: Mapping[Variable, Fraction | int],
) -> list[FiberRelation]:
    specialized = []
    for relation in relations:
        fiber = FiberRelation(
            relation, evaluate(relation.lhs, point), evaluate(relation.rhs, point)
        )
        if fiber.degenerate:
            logger.warning(
                "Relation for %s, %s degenerates at the given point",
                relation.A,
                relation.B,
            )
        specialized.append(fiber)
    return specialized


@dataclass(frozen=True)
class SegreVerdict:
    accepted: bool
    scaling: dict[int, Fraction] = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.accepted


def _quadric_rows(
    quadrics: Sequence[Mapping[tuple[int, int], Fraction]],
    n: int,
) -> list[list[Fraction]]:
    monomials = list(itertools.combinations_with_replacement(range(1 << n), 2))
    index = {m: i for i, m in enumerate(monomials)}
    rows = []
    for quadric in quadrics:
        row = [Fraction(0)] * len(monomials)
        for monomial, coeff in quadric.items():
            row[index[tuple(sorted(monomial))]] += coeff  # type: ignore[index]
        rows.append(row)
    return rows


def _rank(rows: Sequence[Sequence[Fraction]]) -> int:
    if not rows:
        return 0
    return int(
        DomainMatrix(
            [[to_ground(x) for x in row] for row in rows], (len(rows), len(rows[0])), QQ
        ).rank()
    )


def segre_scaling(relations: Sequence[FiberRelation], n: int) -> SegreVerdict:
    """
    Look for nonzero ``u_S`` such that substituting ``z_S -> u_S z_S`` turns
    the span of ``relations`` into the span of the Segre quadrics. The
    scaling is fixed to one on the empty set and on singletons; a relation
    with a single unknown generator pins its scale.
    """
    for fiber in relations:
        if fiber.degenerate:
            return SegreVerdict(
                False,
                reason="relation for %s, %s is degenerate"
                % (fiber.relation.A, fiber.relation.B),
            )
        if any(m >= 1 << n for m in fiber.relation.generators()):
            raise ValueError("Relation uses generators outside a %d-element set" % n)

    scaling: dict[int, Fraction] = {0: Fraction(1)}
    scaling.update({1 << p: Fraction(1) for p in range(n)})
    pending = list(relations)
    while pending:
        remaining = []
        for fiber in pending:
            a, b, u, i = fiber.relation.generators()
            unknown = {a, b, u, i} - scaling.keys()
            if len(unknown) != 1:
                if unknown:
                    remaining.append(fiber)
                continue
            (m,) = unknown
            left = fiber.lhs * _product(scaling, (a, b), m)
            right = fiber.rhs * _product(scaling, (u, i), m)
            scaling[m] = right / left if m in (a, b) else left / right
        if len(remaining) == len(pending):
            break
        pending = remaining
    for m in range(1 << n):
        scaling.setdefault(m, Fraction(1))

    for fiber in relations:
        a, b, u, i = fiber.relation.generators()
        if fiber.lhs * scaling[a] * scaling[b] != fiber.rhs * scaling[u] * scaling[i]:
            where = (fiber.relation.A, fiber.relation.B)
            reason = "inconsistent scale at %s, %s" % where
            logger.info("Fiber is not Segre: %s", reason)
            return SegreVerdict(False, scaling, reason)

    substituted = []
    for fiber in relations:
        a, b, u, i = fiber.relation.generators()
        substituted.append(
            {
                (a, b): fiber.lhs * scaling[a] * scaling[b],
                (u, i): -fiber.rhs * scaling[u] * scaling[i],
            }
        )
    reference = [
        {eq.left: Fraction(1), eq.right: Fraction(-1)} for eq in segre_equations(n)
    ]
    given, segre = _quadric_rows(substituted, n), _quadric_rows(reference, n)
    ranks = (_rank(given), _rank(segre), _rank([*given, *segre]))
    if len(set(ranks)) != 1:
        reason = "spans differ: ranks %d, %d, joint %d" % ranks
        logger.info("Fiber is not Segre: %s", reason)
        return SegreVerdict(False, scaling, reason)
    return SegreVerdict(True, scaling)


def _product(
    scaling: Mapping[int, Fraction], masks: Sequence[int], skip: int
) -> Fraction:
    value = Fraction(1)
    for m in masks:
        if m != skip:
            value *= scaling[m]
    return value


def compare_with_segre(relations: Sequence[FiberRelation], n: int) -> bool:
    return segre_scaling(relations, n).accepted
