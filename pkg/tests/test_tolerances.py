import threading

import pytest

from opdefect import tolerances


def test_defaults():
    t = tolerances.get()
    assert t.psd_tol == 1e-9 and t.herm_tol == 1e-9
    assert t.cluster_tol == 1e-7 and t.merge_tol == 1e-9


def test_override_is_scoped():
    with tolerances.override(psd_tol=1e-6) as t:
        assert t.psd_tol == 1e-6 and tolerances.get().psd_tol == 1e-6
    assert tolerances.get().psd_tol == 1e-9


def test_override_does_not_leak_across_threads():
    seen = []
    with tolerances.override(psd_tol=1e-3):
        th = threading.Thread(target=lambda: seen.append(tolerances.get().psd_tol))
        th.start()
        th.join()
    assert seen == [1e-9]


def test_environment(monkeypatch):
    monkeypatch.setenv(tolerances.ENV_VAR, "1e-7")
    assert tolerances.from_environment().psd_tol == 1e-7
    monkeypatch.setenv(tolerances.ENV_VAR, "")
    assert tolerances.from_environment().psd_tol == 1e-9
    for bad in ("abc", "-1", "inf", "0"):
        monkeypatch.setenv(tolerances.ENV_VAR, bad)
        with pytest.raises(ValueError):
            tolerances.from_environment()
