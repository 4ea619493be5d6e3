from __future__ import annotations

import csv
import re
from fractions import Fraction
from typing import Any

from django.utils.translation import gettext

from rest_framework import serializers

from zastava.divisorbase import ColoredSubset
from zastava.exactalg import MPoly, Variable, poly_from_text, poly_to_text

__all__ = [
    "CSVField",
    "ColoredSubsetField",
    "DimensionField",
    "PointField",
    "PolynomialField",
    "RationalField",
]

ASSIGNMENT = re.compile(r"\s*([A-Za-z0-9_]+)\s*=\s*(\d+)\s*")
COORDINATE = re.compile(r"\s*([A-Za-z0-9_]+):(\d+)\s*=\s*(-?\d+(?:/\d+)?)\s*")


class CSVField(serializers.ListField):
    """
    Parses a comma-separated string into a list of values.

    Requires a ``child`` argument for validation and conversion for each item.
    Lists are accepted as they are, so the same field reads command line
    values and JSON payloads.
    """

    def to_internal_value(self, data: Any) -> list[Any]:
        if isinstance(data, str):
            data = next(csv.reader([data])) if data.strip() else []
        return super().to_internal_value(data)


class RationalField(serializers.Field):
    """A rational number written ``p`` or ``p/q``."""

    def to_internal_value(self, data: Any) -> Fraction:
        if isinstance(data, int) and not isinstance(data, bool):
            return Fraction(data)
        if isinstance(data, str) and re.fullmatch(r"\s*-?\d+(/\d+)?\s*", data):
            try:
                return Fraction(data.strip())
            except ZeroDivisionError:
                pass
        raise serializers.ValidationError(
            gettext("Expected a rational number such as 3 or -1/2.")
        )

    def to_representation(self, value: Fraction) -> str:
        return str(value)


class DimensionField(CSVField):
    """Parses ``id=n,id=n`` into a mapping of vertex ids to dimensions."""

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault("child", serializers.CharField())
        kwargs.setdefault("allow_empty", False)
        super().__init__(**kwargs)

    def to_internal_value(self, data: Any) -> dict[str, int]:  # type: ignore[override]
        if isinstance(data, dict):
            data = ["%s=%s" % item for item in data.items()]
        dims: dict[str, int] = {}
        for item in super().to_internal_value(data):
            match = ASSIGNMENT.fullmatch(item)
            if match is None:
                raise serializers.ValidationError(
                    gettext("Expected 'vertex=n', got '%(item)s'.") % {"item": item}
                )
            vertex, n = match.group(1), int(match.group(2))
            if vertex in dims:
                raise serializers.ValidationError(
                    gettext("Vertex '%(vertex)s' is given twice.") % {"vertex": vertex}
                )
            dims[vertex] = n
        return dims

    def to_representation(self, value: Any) -> dict[str, int]:  # type: ignore[override]
        return {str(v): int(n) for v, n in dict(value).items()}


class PointField(CSVField):
    """
    Parses ``id:slot=value,...`` into a point of the coordinate space. Values
    are rationals ``p`` or ``p/q``.
    """

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault("child", serializers.CharField())
        super().__init__(**kwargs)

    def to_internal_value(self, data: Any) -> dict[Variable, Fraction]:  # type: ignore[override]
        if isinstance(data, dict):
            data = ["%s=%s" % item for item in data.items()]
        point: dict[Variable, Fraction] = {}
        for item in super().to_internal_value(data):
            match = COORDINATE.fullmatch(item)
            if match is None:
                raise serializers.ValidationError(
                    gettext("Expected 'vertex:slot=value', got '%(item)s'.")
                    % {"item": item}
                )
            variable = Variable(match.group(1), int(match.group(2)))
            if variable in point:
                raise serializers.ValidationError(
                    gettext("Coordinate '%(name)s' is given twice.")
                    % {"name": variable.name}
                )
            point[variable] = RationalField().to_internal_value(match.group(3))
        return point

    def to_representation(self, value: Any) -> dict[str, str]:  # type: ignore[override]
        return {
            "%s:%d" % (v.color, v.slot): str(x) for v, x in sorted(dict(value).items())
        }


class PolynomialField(serializers.Field):
    """
    Canonical polynomial text. Parsing needs the coordinate ring, taken from
    the ``ambient`` entry of the serializer context.
    """

    def to_representation(self, value: MPoly) -> str:
        return poly_to_text(value)

    def to_internal_value(self, data: Any) -> MPoly:
        ambient = self.context.get("ambient")
        if ambient is None:
            raise serializers.ValidationError(
                gettext("Polynomials cannot be read without an ambient ring.")
            )
        try:
            return poly_from_text(str(data), ambient.ring)
        except ValueError:
            raise serializers.ValidationError(
                gettext("Invalid polynomial '%(text)s'.") % {"text": data}
            ) from None


class ColoredSubsetField(serializers.DictField):
    """A colored subset as an object mapping vertex ids to sorted slot arrays."""

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault(
            "child", serializers.ListField(child=serializers.IntegerField(min_value=1))
        )
        super().__init__(**kwargs)

    def to_representation(self, value: ColoredSubset) -> dict[str, list[int]]:  # type: ignore[override]
        return value.to_json()

    def to_internal_value(self, data: Any) -> ColoredSubset:  # type: ignore[override]
        mapping = super().to_internal_value(data)
        alpha = self.context.get("alpha")
        if alpha is None:
            raise serializers.ValidationError(
                gettext("Subsets cannot be read without a dimension vector.")
            )
        try:
            return ColoredSubset.of(alpha, mapping)
        except ValueError as exc:
            raise serializers.ValidationError(str(exc)) from None
