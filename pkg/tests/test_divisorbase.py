import random
from math import comb

from django.test import override_settings

import pytest
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from zastava.divisorbase import (
    CertificationError,
    ColoredSubset,
    basis_matrix,
    diagonal_divisor_pullback,
    global_basis,
    gr_presentation,
    gr_restrict_regular,
    restrict_poly,
    sample_regular_point,
    subsets_of,
)
from zastava.exactalg import evaluate, to_ground
from zastava.quiver import DimVector

ALPHA_2 = DimVector.of({"v": 2})
ALPHA_11 = DimVector.of({"1": 1, "2": 1})


def test_colored_subset_mask() -> None:
    alpha = DimVector.of({"1": 2, "2": 1})
    subset = ColoredSubset.of(alpha, {"1": [2], "2": [1]})
    assert subset.mask == 0b110
    assert ColoredSubset.from_mask(alpha, 0b110) == subset
    assert subset.cocharacter() == (0, 1, 1)
    assert subset.size == DimVector.of({"1": 1, "2": 1})
    assert subset.to_json() == {"1": [2], "2": [1]}
    assert str(subset) == "{1:2,2:1}"
    assert len(subset) == 2
    assert str(ColoredSubset.from_mask(ALPHA_2, 0b11)) == "{1,2}"


def test_colored_subset_operations() -> None:
    a = ColoredSubset.of(ALPHA_2, {"v": [1]})
    b = ColoredSubset.of(ALPHA_2, {"v": [2]})
    assert (a | b) == ColoredSubset.full(ALPHA_2)
    assert (a & b) == ColoredSubset.empty(ALPHA_2)
    assert (a | b) - a == b
    assert a <= a | b
    assert not a <= b
    assert a.complement() == b


def test_colored_subset_validation() -> None:
    with pytest.raises(ValueError, match="must lie in 1..2"):
        ColoredSubset.of(ALPHA_2, {"v": [3]})
    with pytest.raises(ValueError, match="Unknown vertices: w"):
        ColoredSubset.of(ALPHA_2, {"w": [1]})
    with pytest.raises(ValueError, match="out of range"):
        ColoredSubset.from_mask(ALPHA_2, 4)
    with pytest.raises(ValueError, match="different index sets"):
        ColoredSubset.empty(ALPHA_2) | ColoredSubset.empty(ALPHA_11)


def test_subsets_of() -> None:
    assert [s.to_json() for s in subsets_of(ALPHA_2, DimVector.of({"v": 1}))] == [
        {"v": [1]},
        {"v": [2]},
    ]
    assert [s.to_json() for s in subsets_of(ALPHA_2)] == [
        {"v": []},
        {"v": [1]},
        {"v": [2]},
        {"v": [1, 2]},
    ]
    beta = DimVector.of({"1": 1, "2": 0})
    assert [s.to_json() for s in subsets_of(ALPHA_11, beta)] == [{"1": [1], "2": []}]
    with pytest.raises(ValueError, match="is not bounded by"):
        subsets_of(ALPHA_2, DimVector.of({"v": 3}))


def test_diagonal_divisor_pullback() -> None:
    ambient = ALPHA_2.ambient()
    a1, a2 = ambient.ring.gens
    assert diagonal_divisor_pullback("v", "v", ALPHA_2) == -((a1 - a2) ** 2)
    assert diagonal_divisor_pullback("v", "v", DimVector.of({"v": 1})) == 1

    b1, b2 = ALPHA_11.ambient().ring.gens
    assert diagonal_divisor_pullback("1", "2", ALPHA_11) == b1 - b2


@pytest.mark.parametrize(
    "n, k, rank",
    (
        (1, 0, 1),
        (1, 1, 1),
        (2, 1, 2),
        (3, 1, 3),
        (4, 2, 6),
        (5, 2, 10),
    ),
)
def test_gr_presentation_rank(n: int, k: int, rank: int) -> None:
    presentation = gr_presentation(DimVector.of({"v": n}), DimVector.of({"v": k}))
    assert presentation.rank == rank
    assert len(presentation.relations) == n
    assert len(presentation.generators) == n


def test_gr_presentation_generators() -> None:
    presentation = gr_presentation(
        DimVector.of({"1": 3, "2": 2}), DimVector.of({"1": 1, "2": 2})
    )
    assert presentation.generators == ("c_1_1", "d_1_1", "d_1_2", "c_2_1", "c_2_2")
    assert presentation.rank == 3
    with pytest.raises(ValueError, match="Unknown generator c_1_2"):
        presentation.gen("c_1_2")


@pytest.mark.parametrize(
    "alpha, beta",
    (
        *(
            (DimVector.of({"v": n}), DimVector.of({"v": k}))
            for n in range(1, 7)
            for k in range(n + 1)
        ),
        (DimVector.of({"1": 2, "2": 2}), DimVector.of({"1": 1, "2": 1})),
        (DimVector.of({"1": 3, "2": 1}), DimVector.of({"1": 2, "2": 0})),
    ),
)
def test_relations_vanish_on_regular_part(alpha: DimVector, beta: DimVector) -> None:
    presentation = gr_presentation(alpha, beta)
    for subset in subsets_of(alpha, beta):
        for relation in presentation.relations:
            assert restrict_poly(presentation, relation, subset) == 0


def test_gr_restrict_regular() -> None:
    presentation = gr_presentation(ALPHA_2, DimVector.of({"v": 1}))
    a1, a2 = ALPHA_2.ambient().ring.gens
    subset = ColoredSubset.of(ALPHA_2, {"v": [1]})
    assert gr_restrict_regular(presentation, "c_v_1", subset) == a1
    assert gr_restrict_regular(presentation, "d_v_1", subset) == a2
    assert gr_restrict_regular(presentation, "a_v_2", subset) == a2

    with pytest.raises(ValueError, match="does not have size"):
        gr_restrict_regular(presentation, "c_v_1", ColoredSubset.full(ALPHA_2))


def test_restrict_poly_substitutes_all_generators() -> None:
    alpha = DimVector.of({"1": 2, "2": 3})
    presentation = gr_presentation(alpha, DimVector.of({"1": 1, "2": 2}))
    b1, b2, x1, x2, x3 = alpha.ambient().ring.gens
    subset = ColoredSubset.of(alpha, {"1": [2], "2": [1, 3]})
    c1, c2 = presentation.c("2", 1), presentation.c("2", 2)
    poly = 3 * presentation.c("1", 1) * presentation.d("1", 1) - c1**2 * c2
    poly += presentation.d("2", 1) * presentation.gen("a_1_1") + 5

    expected = 3 * b2 * b1 - (x1 + x3) ** 2 * x1 * x3 + x2 * b1 + 5
    assert restrict_poly(presentation, poly, subset) == expected
    assert restrict_poly(presentation, presentation.ring.zero, subset) == 0


def test_global_basis_small() -> None:
    presentation = gr_presentation(ALPHA_2, DimVector.of({"v": 1}))
    basis = global_basis(ALPHA_2, DimVector.of({"v": 1}))
    assert basis == [presentation.ring.one, presentation.c("v", 1)]

    a1, a2 = ALPHA_2.ambient().ring.gens
    assert basis_matrix(presentation, basis) == [[1, 1], [a1, a2]]

    alpha = DimVector.of({"v": 1})
    assert global_basis(alpha, alpha) == [gr_presentation(alpha, alpha).ring.one]


@pytest.mark.parametrize(
    "alpha, beta",
    (
        *(
            (DimVector.of({"v": n}), DimVector.of({"v": k}))
            for n in range(1, 7)
            for k in range(n + 1)
        ),
        (DimVector.of({"1": 2, "2": 3}), DimVector.of({"1": 1, "2": 1})),
        (DimVector.of({"1": 3, "2": 1}), DimVector.of({"1": 0, "2": 1})),
    ),
)
def test_global_basis_is_certified(alpha: DimVector, beta: DimVector) -> None:
    presentation = gr_presentation(alpha, beta)
    basis = global_basis(alpha, beta, seed=3)
    assert len(basis) == presentation.rank == len(subsets_of(alpha, beta))

    point = sample_regular_point(alpha, random.Random(11))
    rows = [
        [to_ground(evaluate(entry, point)) for entry in row]
        for row in basis_matrix(presentation, basis)
    ]
    assert DomainMatrix(rows, (len(rows), len(rows)), QQ).det() != 0


def test_global_basis_is_seeded() -> None:
    alpha, beta = DimVector.of({"v": 4}), DimVector.of({"v": 2})
    assert global_basis(alpha, beta, seed=5) == global_basis(alpha, beta, seed=5)
    with override_settings(ZASTAVA={"SEED": 5}):
        assert global_basis(alpha, beta) == global_basis(alpha, beta, seed=5)


@override_settings(ZASTAVA={"CERTIFY_ATTEMPTS": 0})
def test_global_basis_gives_up() -> None:
    with pytest.raises(CertificationError, match="after 0 points"):
        global_basis(ALPHA_2, DimVector.of({"v": 1}))


def test_sample_regular_point() -> None:
    alpha = DimVector.of({"1": 2, "2": 3})
    point = sample_regular_point(alpha, random.Random(0))
    assert list(point) == list(alpha.variables())
    assert len(set(point.values())) == 5
    assert all(0 <= x <= 50 for x in point.values())
    assert point == sample_regular_point(alpha, random.Random(0))

    with override_settings(ZASTAVA={"SAMPLE_SCALE": 1}):
        point = sample_regular_point(alpha, random.Random(0))
    assert len(set(point.values())) == 5
    assert all(0 <= x <= 5 for x in point.values())


def test_rank_matches_binomial_count() -> None:
    for n in range(1, 7):
        for k in range(n + 1):
            alpha, beta = DimVector.of({"v": n}), DimVector.of({"v": k})
            assert gr_presentation(alpha, beta).rank == comb(n, k)
            assert len(subsets_of(alpha, beta)) == comb(n, k)
