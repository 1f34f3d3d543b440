"""Shared fixtures and the global validity hook.

Every ``InverseGraph`` constructed while a test runs is recorded and must
pass ``validate`` when the test ends. Tests that build malformed graphs on
purpose carry the ``malformed`` marker.
"""

import pytest
from hypothesis import HealthCheck, settings

from invgraphs.graph import InverseGraph, validate

# the autouse hook is function-scoped on purpose: it checks every graph
# built across all examples of a test
settings.register_profile(
    "invgraphs", suppress_health_check=[HealthCheck.function_scoped_fixture], deadline=None
)
settings.load_profile("invgraphs")

_created = []
STATS = {"graphs": 0, "tests": 0}

_orig_init = InverseGraph.__init__


def _recording_init(self, *args, **kwargs):
    _orig_init(self, *args, **kwargs)
    _created.append(self)


InverseGraph.__init__ = _recording_init


def pytest_configure(config):
    config.addinivalue_line("markers", "malformed: test builds invalid graphs on purpose")
    config.addinivalue_line("markers", "slow: long-running exhaustive check")


def drain_created():
    """Hand over the graphs recorded so far and start a fresh record."""
    out = list(_created)
    _created.clear()
    return out


@pytest.fixture(autouse=True)
def _every_graph_validates(request):
    _created.clear()
    yield
    graphs = drain_created()
    if request.node.get_closest_marker("malformed"):
        return
    seen = set()
    for g in graphs:
        if id(g) in seen:
            continue
        seen.add(id(g))
        report = validate(g)
        assert report.ok, f"produced graph {g!r} is invalid:\n{report}"
    STATS["graphs"] += len(seen)
    STATS["tests"] += 1


@pytest.fixture(params=["python", "compiled"])
def backend(request):
    """Each kernel backend in turn (compiled skipped when not built)."""
    from invgraphs import kernels

    if request.param == "compiled":
        if kernels.compiled_backend is None:
            pytest.skip("compiled kernels not built")
        return kernels.compiled_backend
    return kernels.python_backend


def pytest_terminal_summary(terminalreporter):
    if STATS["tests"]:
        terminalreporter.write_line(
            f"graph validity: {STATS['graphs']} produced graphs validated across {STATS['tests']} tests"
        )
