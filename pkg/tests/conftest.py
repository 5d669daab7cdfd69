from __future__ import annotations

import contextlib

import pytest

from redres.satcore import BACKENDS


@pytest.fixture
def criterion(capsys):
    """Context manager printing one PASS/FAIL line for an acceptance criterion."""

    @contextlib.contextmanager
    def run(number: int, title: str):
        try:
            yield
        except BaseException as exc:
            with capsys.disabled():
                print(f"\n[criterion {number:2d}] FAIL  {title}: {type(exc).__name__}: {exc}")
            raise
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] PASS  {title}")

    return run


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param
