from __future__ import annotations

from typing import TYPE_CHECKING, Any

from django.utils.translation import gettext, ngettext

from rest_framework import serializers
from rest_framework.settings import api_settings

if TYPE_CHECKING:
    from collections.abc import Sequence

    from django.utils.functional import _StrOrPromise as StrOrPromise
else:
    from django.utils.functional import Promise as StrPromise

    StrOrPromise = str | StrPromise


__all__ = [
    "AnyOf",
    "Constraint",
    "MutuallyExclusive",
    "OptionGroup",
    "RequiredFor",
]


def _quoted(names: Sequence[str]) -> str:
    return ", ".join(f"'{name}'" for name in names)


class Constraint:
    """A check over the validated options of a run, as a whole."""

    def __init__(self, *, message: StrOrPromise = "") -> None:
        self._message = message

    def default_message(
        self, values: dict[str, Any], **kwargs: Any
    ) -> dict[str, list[StrOrPromise]]:
        message = gettext("Options are inconsistent (%(constraint)s).") % {
            "constraint": self.__class__.__name__
        }
        return {api_settings.NON_FIELD_ERRORS_KEY: [message]}

    def get_message(self, values: dict[str, Any], **kwargs: Any) -> dict[str, Any]:
        if self._message:
            return {api_settings.NON_FIELD_ERRORS_KEY: [self._message]}
        return self.default_message(values, **kwargs)

    def check(self, values: dict[str, Any]) -> None:
        raise NotImplementedError


class OptionGroup(Constraint):
    """A constraint on how many options of a group carry a value."""

    def __init__(self, *, message: StrOrPromise = "", fields: Sequence[str]) -> None:
        self.fields = fields
        super().__init__(message=message)

    def given(self, values: dict[str, Any]) -> list[str]:
        return [field for field in self.fields if values.get(field) is not None]


class MutuallyExclusive(OptionGroup):
    def __init__(self, *, message: StrOrPromise = "", fields: Sequence[str]) -> None:
        assert len(fields) > 1, "MutuallyExclusive needs at least two options"
        super().__init__(message=message, fields=fields)

    def default_message(
        self, values: dict[str, Any], **kwargs: Any
    ) -> dict[str, list[StrOrPromise]]:
        message = gettext("Options %(given)s cannot be combined, give only one.")
        return {
            api_settings.NON_FIELD_ERRORS_KEY: [
                message % {"given": _quoted(self.given(values))}
            ]
        }

    def check(self, values: dict[str, Any]) -> None:
        if len(self.given(values)) > 1:
            raise serializers.ValidationError(self.get_message(values))


class AnyOf(OptionGroup):
    def default_message(
        self, values: dict[str, Any], **kwargs: Any
    ) -> dict[str, list[StrOrPromise]]:
        message = gettext("Missing input, give one of %(fields)s.")
        return {
            api_settings.NON_FIELD_ERRORS_KEY: [
                message % {"fields": _quoted(self.fields)}
            ]
        }

    def check(self, values: dict[str, Any]) -> None:
        if not self.given(values):
            raise serializers.ValidationError(self.get_message(values))


class RequiredFor(Constraint):
    """
    Options that must be present when ``option`` takes one of ``choices``,
    e.g. the point of a ``fiber`` run.
    """

    def __init__(
        self,
        *,
        message: StrOrPromise = "",
        option: str,
        choices: Sequence[str],
        requires: Sequence[str],
    ) -> None:
        self.option = option
        self.choices = choices
        self.requires = requires
        super().__init__(message=message)

    def default_message(
        self, values: dict[str, Any], **kwargs: Any
    ) -> dict[str, list[StrOrPromise]]:
        missing = kwargs["missing"]
        message = ngettext(
            "This option is required when %(option)s is %(value)s.",
            "These options are required when %(option)s is %(value)s.",
            len(missing),
        ) % {"option": self.option, "value": values[self.option]}
        return {field: [message] for field in missing}

    def check(self, values: dict[str, Any]) -> None:
        if values.get(self.option) not in self.choices:
            return
        missing = [field for field in self.requires if values.get(field) is None]
        if missing:
            raise serializers.ValidationError(self.get_message(values, missing=missing))
