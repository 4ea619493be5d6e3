from typing import Any

from rest_framework import serializers

import pytest

from zastava.constraints import (
    AnyOf,
    Constraint,
    MutuallyExclusive,
    OptionGroup,
    RequiredFor,
)


def _detail(constraint: Constraint, values: dict[str, Any]) -> Any:
    with pytest.raises(serializers.ValidationError) as ctx:
        constraint.check(values)
    return ctx.value.detail


def test_mutually_exclusive() -> None:
    constraint = MutuallyExclusive(fields=["quiver", "kappa"])
    assert _detail(constraint, {"quiver": "a.quiver", "kappa": "a.kappa"}) == {
        "non_field_errors": [
            "Options 'quiver', 'kappa' cannot be combined, give only one."
        ]
    }
    constraint.check({"quiver": "a.quiver", "kappa": None})
    constraint.check({"kappa": "a.kappa"})
    constraint.check({})


def test_mutually_exclusive_names_given_options_only() -> None:
    constraint = MutuallyExclusive(fields=["quiver", "kappa", "point"])
    assert _detail(constraint, {"quiver": "a", "kappa": None, "point": {}}) == {
        "non_field_errors": [
            "Options 'quiver', 'point' cannot be combined, give only one."
        ]
    }


def test_mutually_exclusive_requires_two_fields() -> None:
    with pytest.raises(AssertionError, match="at least two options"):
        MutuallyExclusive(fields=["quiver"])


def test_any_of() -> None:
    constraint = AnyOf(fields=["quiver", "kappa"])
    assert _detail(constraint, {"quiver": None}) == {
        "non_field_errors": ["Missing input, give one of 'quiver', 'kappa'."]
    }
    constraint.check({"kappa": "a.kappa"})


def test_required_for() -> None:
    constraint = RequiredFor(option="command", choices=["fiber"], requires=["point"])
    assert _detail(constraint, {"command": "fiber", "point": None}) == {
        "point": ["This option is required when command is fiber."]
    }
    constraint.check({"command": "verify", "point": None})
    constraint.check({"command": "fiber", "point": {"v:1": 0}})


def test_required_for_plural() -> None:
    constraint = RequiredFor(
        option="command", choices=["fiber", "export"], requires=["point", "base"]
    )
    assert _detail(constraint, {"command": "export"}) == {
        "point": ["These options are required when command is export."],
        "base": ["These options are required when command is export."],
    }


@pytest.mark.parametrize(
    "constraint, values",
    (
        (
            MutuallyExclusive(fields=["quiver", "kappa"], message="Pick one."),
            {"quiver": 1, "kappa": 2},
        ),
        (AnyOf(fields=["quiver", "kappa"], message="Pick one."), {}),
        (
            RequiredFor(
                option="command",
                choices=["fiber"],
                requires=["point"],
                message="Pick one.",
            ),
            {"command": "fiber"},
        ),
    ),
)
def test_custom_message(constraint: Constraint, values: dict[str, Any]) -> None:
    assert _detail(constraint, values) == {"non_field_errors": ["Pick one."]}


def test_base_constraint() -> None:
    constraint = Constraint()
    with pytest.raises(NotImplementedError):
        constraint.check({})
    assert constraint.get_message({}) == {
        "non_field_errors": ["Options are inconsistent (Constraint)."]
    }


def test_option_group_counts_present_values() -> None:
    group = OptionGroup(fields=["quiver", "kappa", "point"])
    given = group.given({"quiver": "a", "kappa": None, "point": {}})
    assert given == ["quiver", "point"]
    assert group.given({"dim": "v=1"}) == []
