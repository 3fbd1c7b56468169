from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from dtcalc.instances import load

settings.register_profile(
    "dtcalc",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("dtcalc")


@pytest.fixture(scope="session")
def corpus():
    return {name: load(name) for name in ("q1", "q2", "bgm", "a1gm", "a2gm_pm1", "p1gm")}
