"""Shared test configuration."""

from hypothesis import HealthCheck, settings

settings.register_profile("suite", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

# One line per release criterion, filled in by the acceptance tests and
# echoed after the run (plain prints are swallowed by capture).
acceptance_lines: list = []


def pytest_terminal_summary(terminalreporter):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)
