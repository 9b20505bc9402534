from hypothesis import HealthCheck, settings

# derandomize: every property test draws the same examples on every run
settings.register_profile("fixed", derandomize=True, deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fixed")


def pytest_terminal_summary(terminalreporter):
    import sys

    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(acc.RESULTS, key=lambda k: (int(k.split()[0]), k)):
        terminalreporter.write_line(acc.RESULTS[key])
