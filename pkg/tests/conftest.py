import pytest

CRITERIA = {
    1: "thermal occupation at 0.4 K",
    2: "single-photon coupling normalization",
    3: "stability boundary in xi",
    4: "Lyapunov residual and time-integration oracle",
    5: "two-mode squeezed vacuum oracles",
    6: "physicality audit over sweeps",
    7: "entanglement curve shapes vs xi",
    8: "cooling moment system vs quadrature Lyapunov",
    9: "phonon number interior minimum",
    10: "steering contained in entanglement",
    11: "byte-identical reproduction across worker counts",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(marker.args[0], []).append((item.name, rep.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n:2d} [{CRITERIA[n]}]: NOT RUN")
            continue
        failed = [name for name, out in results if out != "passed"]
        verdict = "PASS" if not failed else "FAIL"
        detail = f"{len(results) - len(failed)}/{len(results)} checks passed"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        tr.write_line(f"criterion {n:2d} [{CRITERIA[n]}]: {verdict} ({detail})")
