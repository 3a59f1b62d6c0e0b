import random

from hypothesis import HealthCheck, settings, strategies as st

from treelex.forest import random_forest

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def forests(draw, max_vertices=8, min_vertices=1):
    n = draw(st.integers(min_vertices, max_vertices))
    seed = draw(st.integers(0, 2 ** 32))
    return random_forest(random.Random(seed), n)


def relabelled(F, rng):
    """``F`` under a random renaming, vertex order and root order."""
    names = [f"u{i}" for i in range(len(F))]
    rng.shuffle(names)
    mapping = dict(zip(F.vertices, names))
    order = list(mapping.values())
    rng.shuffle(order)
    roots = [mapping[r] for r in F.roots]
    rng.shuffle(roots)
    return F.relabel(mapping, order=order, root_order=roots), mapping


# one summary line per acceptance criterion

_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


import pytest  # noqa: E402


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA[number] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}")
