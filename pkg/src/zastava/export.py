from __future__ import annotations

from typing import TYPE_CHECKING, Literal

from zastava.conf import app_settings
from zastava.exactalg import MPoly, poly_to_text

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from zastava.localspace import Relation
    from zastava.quiver import DimVector

__all__ = [
    "m2_names",
    "quadric_text",
    "to_m2",
    "to_singular",
]

Base = Literal["poly", "frac"]


def _term(coeff: MPoly, monomial: str, names: Sequence[str] | None) -> str:
    if coeff == 1:
        return monomial
    if coeff == -1:
        return "-" + monomial
    return "(%s)*%s" % (poly_to_text(coeff, names), monomial)


def quadric_text(
    relation: Relation,
    gen: Callable[[int], str],
    names: Sequence[str] | None = None,
) -> str:
    """
    ``lhs*z_A*z_B - rhs*z_U*z_I`` with generators named by ``gen`` and the
    coordinates spelled as ``names`` (the ring's own names by default).
    """
    a, b, u, i = relation.generators()
    first = _term(relation.lhs, "%s*%s" % (gen(a), gen(b)), names)
    second = _term(-relation.rhs, "%s*%s" % (gen(u), gen(i)), names)
    if second.startswith("-"):
        return "%s - %s" % (first, second[1:])
    return "%s + %s" % (first, second)


def m2_names(alpha: DimVector) -> list[str]:
    """
    Macaulay2 spelling of the coordinates. ``_`` is the subscript operator
    there, so ``a_v_1`` becomes the indexed variable ``a_(i,1)`` where ``i``
    is the position of vertex ``v``, counted from one.
    """
    return [
        "a_(%d,%d)" % (alpha.vertices.index(v.color) + 1, v.slot)
        for v in alpha.variables()
    ]


def to_m2(
    relations: Sequence[Relation],
    alpha: DimVector,
    *,
    base: Base | None = None,
    title: str = "",
) -> str:
    base = base or app_settings.CAS_BASE
    last = (1 << alpha.total) - 1
    names = m2_names(alpha)
    coefficients = "QQ[%s]" % ", ".join(names)
    lines = ["-- %s" % title] if title else []
    lines.append(
        "-- a_(i,l) is slot l of vertex i: %s"
        % ", ".join("%d=%s" % (k, v) for k, v in enumerate(alpha.vertices, 1))
    )
    lines.append(
        "A = %s;" % (coefficients if base == "poly" else "frac(%s)" % coefficients)
    )
    lines.append("R = A[z_0..z_%d];" % last)
    quadrics = [quadric_text(r, lambda m: "z_%d" % m, names) for r in relations]
    if quadrics:
        lines.append("I = ideal(")
        lines.append(",\n".join("    " + q for q in quadrics))
        lines.append(");")
    else:
        lines.append("I = ideal(0_R);")
    return "\n".join(lines) + "\n"


def to_singular(
    relations: Sequence[Relation],
    alpha: DimVector,
    *,
    base: Base | None = None,
    title: str = "",
) -> str:
    base = base or app_settings.CAS_BASE
    last = (1 << alpha.total) - 1
    names = ",".join(v.name for v in alpha.variables())
    lines = ["// %s" % title] if title else []
    if base == "frac":
        parameters = "(0,%s)" % names if names else "0"
        lines.append("ring R = %s,(z(0..%d)),dp;" % (parameters, last))
    else:
        variables = "%s,z(0..%d)" % (names, last) if names else "z(0..%d)" % last
        lines.append("ring R = 0,(%s),dp;" % variables)
    quadrics = [quadric_text(r, lambda m: "z(%d)" % m) for r in relations]
    if quadrics:
        lines.append("ideal I =")
        lines.append(",\n".join("  " + q for q in quadrics) + ";")
    else:
        lines.append("ideal I = 0;")
    return "\n".join(lines) + "\n"
