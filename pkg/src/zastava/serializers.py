from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from django.utils.translation import gettext

from rest_framework import serializers
from rest_framework.settings import api_settings

from zastava.conf import app_settings
from zastava.constraints import AnyOf, MutuallyExclusive, RequiredFor
from zastava.coulomb import CoulombElement
from zastava.exactalg import MPoly, RatFunc
from zastava.fields import (
    ColoredSubsetField,
    DimensionField,
    PointField,
    PolynomialField,
    RationalField,
)
from zastava.localspace import Relation
from zastava.quiver import DimVector, Quiver
from zastava.utils import collect_errors

if TYPE_CHECKING:
    from collections.abc import Sequence

    from zastava.constraints import Constraint

__all__ = [
    "CoulombTerm",
    "CoulombTermSerializer",
    "FiberRelationSerializer",
    "IdentityReportSerializer",
    "QuiverSerializer",
    "RelationSerializer",
    "RunConfigSerializer",
    "element_from_terms",
    "terms_of",
]

COMMANDS = ("verify", "present", "fiber", "export")
FORMATS = {
    "verify": ("json", "text"),
    "present": ("json", "text"),
    "fiber": ("json", "text"),
    "export": ("json", "m2", "singular"),
}


class QuiverSerializer(serializers.Serializer[Quiver]):
    vertices = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    edges = serializers.ListField(
        child=serializers.ListField(
            child=serializers.CharField(), min_length=2, max_length=2
        ),
        default=list,
    )

    def to_representation(self, instance: Quiver) -> dict[str, Any]:
        return {
            "vertices": list(instance.vertices),
            "edges": [list(edge) for edge in instance.edges],
        }

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        try:
            attrs["quiver"] = Quiver(
                tuple(attrs["vertices"]),
                tuple((s, t) for s, t in attrs["edges"]),
            )
        except ValueError as exc:
            raise serializers.ValidationError(str(exc)) from None
        return attrs

    def create(self, validated_data: dict[str, Any]) -> Quiver:
        return validated_data["quiver"]  # type: ignore[no-any-return]


class RelationSerializer(serializers.Serializer[Relation]):
    """
    Reading relations back requires ``alpha`` (the dimension vector) and
    ``ambient`` (its coordinate ring) in the context.
    """

    A = ColoredSubsetField()
    B = ColoredSubsetField()
    union = ColoredSubsetField()
    intersection = ColoredSubsetField()
    lhs_coeff = PolynomialField(source="lhs")
    rhs_coeff = PolynomialField(source="rhs")

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        a, b = attrs["A"], attrs["B"]
        errors: dict[str, list[Any]] = {}
        if attrs["union"] != a | b:
            errors["union"] = [gettext("Does not match the union of A and B.")]
        if attrs["intersection"] != a & b:
            errors["intersection"] = [
                gettext("Does not match the intersection of A and B.")
            ]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def create(self, validated_data: dict[str, Any]) -> Relation:
        return Relation(
            validated_data["A"],
            validated_data["B"],
            validated_data["lhs"],
            validated_data["rhs"],
        )


@dataclass(frozen=True)
class CoulombTerm:
    chi: dict[str, list[int]]
    coeff_num: MPoly
    coeff_den: MPoly
    rees_degree: int | None


def terms_of(element: CoulombElement) -> list[CoulombTerm]:
    alpha = element.alpha
    terms = []
    for chi, coeff in element:
        grouped, offset = {}, 0
        for vertex, n in alpha:
            grouped[vertex] = list(chi[offset : offset + n])
            offset += n
        terms.append(
            CoulombTerm(grouped, coeff.numer, coeff.denom, element.rees_degree)
        )
    return terms


class CoulombTermSerializer(serializers.Serializer[CoulombTerm]):
    chi = serializers.DictField(
        child=serializers.ListField(child=serializers.IntegerField())
    )
    coeff_num = PolynomialField()
    coeff_den = PolynomialField()
    rees_degree = serializers.IntegerField(min_value=0, allow_null=True)

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        alpha: DimVector = self.context["alpha"]
        chi = attrs["chi"]
        if set(chi) != set(alpha.vertices) or any(
            len(chi[v]) != n for v, n in alpha
        ):
            raise serializers.ValidationError(
                {"chi": [gettext("Cocharacter does not match the dimension vector.")]}
            )
        if attrs["coeff_den"].is_zero:
            raise serializers.ValidationError(
                {"coeff_den": [gettext("Denominator must be nonzero.")]}
            )
        return attrs

    def create(self, validated_data: dict[str, Any]) -> CoulombTerm:
        return CoulombTerm(**validated_data)


def element_from_terms(
    quiver: Quiver,
    alpha: DimVector,
    terms: Sequence[CoulombTerm],
) -> CoulombElement:
    degrees = {t.rees_degree for t in terms}
    if len(degrees) > 1:
        raise ValueError("Terms carry different Rees degrees")
    return CoulombElement(
        quiver,
        alpha,
        [
            (
                tuple(x for v in alpha.vertices for x in t.chi[v]),
                RatFunc.new(t.coeff_num, t.coeff_den),
            )
            for t in terms
        ],
        degrees.pop() if degrees else None,
    )


class FailureSerializer(serializers.Serializer[Any]):
    A = ColoredSubsetField()
    B = ColoredSubsetField()
    lhs = serializers.CharField()
    rhs = serializers.CharField()


class IdentityReportSerializer(serializers.Serializer[Any]):
    quiver = QuiverSerializer()
    alpha = DimensionField()
    pairs = serializers.IntegerField()
    verdict = serializers.SerializerMethodField()
    failures = FailureSerializer(many=True)
    repair = serializers.CharField(allow_null=True)
    elapsed = serializers.FloatField(allow_null=True)

    def get_verdict(self, instance: Any) -> str:
        return "pass" if instance.passed else "fail"

    def to_representation(self, instance: Any) -> dict[str, Any]:
        data = super().to_representation(instance)
        if not app_settings.REPORT_TIMING:
            data.pop("elapsed")
        return data


class FiberRelationSerializer(serializers.Serializer[Any]):
    A = ColoredSubsetField(source="relation.A")
    B = ColoredSubsetField(source="relation.B")
    union = ColoredSubsetField(source="relation.union")
    intersection = ColoredSubsetField(source="relation.intersection")
    lhs = RationalField()
    rhs = RationalField()
    degenerate = serializers.BooleanField(read_only=True)


class RunConfigSerializer(serializers.Serializer[Any]):
    """Validates the options of a command line run."""

    command = serializers.ChoiceField(choices=COMMANDS)
    quiver = serializers.CharField(required=False, allow_null=True, default=None)
    kappa = serializers.CharField(required=False, allow_null=True, default=None)
    dim = DimensionField()
    format = serializers.ChoiceField(
        choices=("json", "text", "m2", "singular"), required=False, default="json"
    )
    seed = serializers.IntegerField(required=False, allow_null=True, default=None)
    side = serializers.ChoiceField(
        choices=("coulomb", "local"), required=False, default="local"
    )
    point = PointField(required=False, allow_null=True, default=None)
    base = serializers.ChoiceField(
        choices=("poly", "frac"), required=False, allow_null=True, default=None
    )
    threads = serializers.IntegerField(
        min_value=1, required=False, allow_null=True, default=None
    )

    def get_constraints(self) -> list[Constraint]:
        return [
            MutuallyExclusive(fields=["quiver", "kappa"]),
            AnyOf(fields=["quiver", "kappa"]),
            RequiredFor(option="command", choices=["fiber"], requires=["point"]),
        ]

    def validate(self, attrs: dict[str, Any]) -> dict[str, Any]:
        errors: dict[str, list[Any]] = {}
        for constraint in self.get_constraints():
            try:
                constraint.check(attrs)
            except serializers.ValidationError as err:
                detail = err.detail
                if not isinstance(detail, dict):
                    detail = {api_settings.NON_FIELD_ERRORS_KEY: detail}
                collect_errors(errors, detail)
        if attrs["format"] not in FORMATS[attrs["command"]]:
            collect_errors(
                errors,
                {
                    "format": [
                        gettext("Format '%(format)s' is not available for %(command)s.")
                        % {"format": attrs["format"], "command": attrs["command"]}
                    ]
                },
            )
        if errors:
            raise serializers.ValidationError(errors)
        if attrs["seed"] is None:
            attrs["seed"] = app_settings.SEED
        if attrs["base"] is None:
            attrs["base"] = app_settings.CAS_BASE
        return attrs
