from __future__ import annotations

from hypothesis import HealthCheck, settings

# every property suite runs at least 200 cases
settings.register_profile(
    "suite",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("suite")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, _, line in sorted(mod.RESULTS):
        terminalreporter.write_line(line)
