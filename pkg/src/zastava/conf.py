from __future__ import annotations

import os
from dataclasses import dataclass, fields
from typing import Any, Literal

import django
from django.conf import settings

THREADS_ENV = "ZCK_THREADS"


def get_default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(value, 1)


@dataclass(frozen=True)
class AppSettings:
    """
    Settings that change how ``zastava`` behaves globally. Most of them can
    also be overridden per call or from the command line.

    Add the ``ZASTAVA`` setting to your Django configuration to change them.
    For example:

    .. code-block:: python

        ZASTAVA = {
            "SEED": 7,
            "THREADS": 4,
        }
    """

    THREADS: int = 0
    """
    Maximum number of worker processes used to verify subset pairs. With
    ``0``, the count is read from ``ZCK_THREADS`` on each access, or is ``1``.
    """
    SEED: int = 0
    """
    Seed for every random choice: regular points, basis certification and
    fiber sampling.
    """
    FULL_GCD: bool = False
    """
    Run a full multivariate gcd when normalizing rational functions. By
    default only content and linear difference forms are cancelled.
    """
    SAMPLE_SCALE: int = 10
    """
    Regular points are drawn from the integers ``0..SAMPLE_SCALE * |α|``.
    """
    CERTIFY_ATTEMPTS: int = 8
    """
    How many random points ``global_basis`` tries before giving up.
    """
    SEGRE_LIMIT: int = 12
    """
    Largest index set accepted by ``segre_equations``.
    """
    CAS_BASE: Literal["poly", "frac"] = "poly"
    """
    Base ring for exported ideals: the polynomial ring in the coordinates
    (``poly``) or its fraction field (``frac``).
    """
    REPORT_TIMING: bool = False
    """
    Include wall time in JSON reports. Off by default so that reports are
    byte-identical across runs.
    """

    def __getattribute__(self, /, __name: str) -> Any:
        user_settings = getattr(settings, "ZASTAVA", {})
        value = user_settings.get(__name, super().__getattribute__(__name))
        if __name == "THREADS" and value == 0:
            # Read lazily so that the environment can change between runs.
            return get_default_threads()
        return value


app_settings = AppSettings()


def snapshot() -> dict[str, Any]:
    """Resolved values of every setting, e.g. to configure worker processes."""
    return {f.name: getattr(app_settings, f.name) for f in fields(AppSettings)}


def configure(**overrides: Any) -> None:
    """
    Prepare Django for standalone use, e.g. from the command line. Does
    nothing to the settings if a settings module is already active.

    :param overrides: Values for the ``ZASTAVA`` setting.
    """
    if not settings.configured:
        settings.configure(
            INSTALLED_APPS=["rest_framework"],
            USE_I18N=True,
            ZASTAVA=overrides,
        )
    django.setup()
