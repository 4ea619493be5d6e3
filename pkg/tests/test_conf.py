from django.test import override_settings

import pytest

from zastava import conf
from zastava.conf import THREADS_ENV, app_settings, get_default_threads


def test_defaults() -> None:
    assert app_settings.SEED == 0
    assert app_settings.FULL_GCD is False
    assert app_settings.SAMPLE_SCALE == 10
    assert app_settings.CERTIFY_ATTEMPTS == 8
    assert app_settings.SEGRE_LIMIT == 12
    assert app_settings.CAS_BASE == "poly"
    assert app_settings.REPORT_TIMING is False


@override_settings(ZASTAVA={"SEED": 7, "CAS_BASE": "frac"})
def test_user_settings() -> None:
    assert app_settings.SEED == 7
    assert app_settings.CAS_BASE == "frac"
    assert app_settings.SEGRE_LIMIT == 12


@pytest.mark.parametrize(
    "raw, threads",
    (
        ("4", 4),
        ("1", 1),
        ("0", 1),
        ("-3", 1),
        ("many", 1),
        ("", 1),
    ),
)
def test_threads_from_environment(
    monkeypatch: pytest.MonkeyPatch, raw: str, threads: int
) -> None:
    monkeypatch.setenv(THREADS_ENV, raw)
    assert get_default_threads() == threads
    assert app_settings.THREADS == threads


def test_threads_default(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(THREADS_ENV, raising=False)
    assert app_settings.THREADS == 1


def test_threads_setting_wins(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(THREADS_ENV, "4")
    with override_settings(ZASTAVA={"THREADS": 2}):
        assert app_settings.THREADS == 2
    with override_settings(ZASTAVA={"THREADS": 0}):
        assert app_settings.THREADS == 4


def test_snapshot(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(THREADS_ENV, "3")
    with override_settings(ZASTAVA={"SEED": 5}):
        snapshot = conf.snapshot()
    assert snapshot == {
        "THREADS": 3,
        "SEED": 5,
        "FULL_GCD": False,
        "SAMPLE_SCALE": 10,
        "CERTIFY_ATTEMPTS": 8,
        "SEGRE_LIMIT": 12,
        "CAS_BASE": "poly",
        "REPORT_TIMING": False,
    }


def test_configure_keeps_active_settings() -> None:
    with override_settings(ZASTAVA={"SEED": 9}):
        conf.configure(SEED=1)
        assert app_settings.SEED == 9
