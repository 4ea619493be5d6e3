import re

from django.test import override_settings

import pytest

from tests.suite import A1, A2, A3, KRONECKER
from zastava.export import m2_names, quadric_text, to_m2, to_singular
from zastava.localspace import locality_relations
from zastava.quiver import DimVector, Quiver

ALPHA_1 = DimVector.of({"v": 1})
ALPHA_2 = DimVector.of({"v": 2})
ALPHA_11 = DimVector.of({"1": 1, "2": 1})

M2_A1 = """\
-- local space with dimension v=2
-- a_(i,l) is slot l of vertex i: 1=v
A = QQ[a_(1,1), a_(1,2)];
R = A[z_0..z_3];
I = ideal(
    (a_(1,1)^2 - 2*a_(1,1)*a_(1,2) + a_(1,2)^2)*z_1*z_2 + z_3*z_0
);
"""

SINGULAR_A1 = """\
ring R = 0,(a_v_1,a_v_2,z(0..3)),dp;
ideal I =
  (a_v_1^2 - 2*a_v_1*a_v_2 + a_v_2^2)*z(1)*z(2) + z(3)*z(0);
"""

# Outside of indexed variables, Macaulay2 reads every "_" as a subscript.
M2_IDENTIFIER = re.compile(r"[A-Za-z]\w*")
M2_INDEXED = re.compile(r"a_\(\d+,\d+\)|z_\d+|0_R")


def test_quadric_text() -> None:
    (relation,) = locality_relations(A2, ALPHA_11)
    assert (
        quadric_text(relation, lambda m: "z_%d" % m)
        == "z_1*z_2 + (-a_1_1 + a_2_1)*z_3*z_0"
    )
    assert (
        quadric_text(relation, lambda m: "z_%d" % m, m2_names(ALPHA_11))
        == "z_1*z_2 + (-a_(1,1) + a_(2,1))*z_3*z_0"
    )
    (relation,) = locality_relations(A1, ALPHA_2)
    assert (
        quadric_text(relation, lambda m: "x[%d]" % m)
        == "(a_v_1^2 - 2*a_v_1*a_v_2 + a_v_2^2)*x[1]*x[2] + x[3]*x[0]"
    )


def test_m2_names() -> None:
    assert m2_names(ALPHA_2) == ["a_(1,1)", "a_(1,2)"]
    alpha = DimVector.of({"1": 1, "2": 0, "3": 2})
    assert m2_names(alpha) == ["a_(1,1)", "a_(3,1)", "a_(3,2)"]


def test_to_m2() -> None:
    relations = locality_relations(A1, ALPHA_2)
    assert to_m2(relations, ALPHA_2, title="local space with dimension v=2") == M2_A1


@pytest.mark.parametrize(
    "quiver, alpha",
    (
        (A1, ALPHA_2),
        (A2, DimVector.of({"1": 2, "2": 1})),
        (A3, DimVector.of({"1": 1, "2": 1, "3": 1})),
        (KRONECKER, DimVector.of({"1": 1, "2": 2})),
    ),
)
def test_to_m2_uses_no_underscored_names(quiver: Quiver, alpha: DimVector) -> None:
    text = to_m2(locality_relations(quiver, alpha), alpha)
    code = "\n".join(line for line in text.splitlines() if not line.startswith("--"))
    for name in M2_IDENTIFIER.findall(M2_INDEXED.sub("", code)):
        assert "_" not in name


def test_to_m2_fraction_field() -> None:
    relations = locality_relations(A1, ALPHA_2)
    text = to_m2(relations, ALPHA_2, base="frac")
    assert text.splitlines()[1] == "A = frac(QQ[a_(1,1), a_(1,2)]);"

    with override_settings(ZASTAVA={"CAS_BASE": "frac"}):
        assert to_m2(relations, ALPHA_2) == text


def test_to_m2_without_relations() -> None:
    assert to_m2([], ALPHA_1) == (
        "-- a_(i,l) is slot l of vertex i: 1=v\n"
        "A = QQ[a_(1,1)];\nR = A[z_0..z_1];\nI = ideal(0_R);\n"
    )


def test_to_singular() -> None:
    relations = locality_relations(A1, ALPHA_2)
    assert to_singular(relations, ALPHA_2) == SINGULAR_A1

    text = to_singular(relations, ALPHA_2, base="frac", title="fraction field")
    assert text.splitlines()[:2] == [
        "// fraction field",
        "ring R = (0,a_v_1,a_v_2),(z(0..3)),dp;",
    ]


def test_to_singular_without_relations() -> None:
    assert to_singular([], ALPHA_1) == (
        "ring R = 0,(a_v_1,z(0..1)),dp;\nideal I = 0;\n"
    )
