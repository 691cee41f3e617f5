"""Shared fixtures: analysis pipelines built once per session.

The acceptance tests register one line per criterion in ACCEPTANCE_RESULTS;
a terminal-summary hook prints them at the end of the run so the verdicts
are visible regardless of output capturing.
"""

from types import SimpleNamespace

import pytest

from fcslab import fixtures, modular, systems

ACCEPTANCE_RESULTS = []

# Seeded random systems shared by the dual-identity and subspace criteria:
# 25 cases cycling through the allowed shapes (n <= 4, d <= 3).
RANDOM_SHAPES = [(2, 2), (3, 2), (4, 2), (2, 3), (3, 3), (4, 3)]
RANDOM_CASES = [
    (seed, *RANDOM_SHAPES[seed % len(RANDOM_SHAPES)]) for seed in range(25)
]


def build_pipeline(sys_, tol=1e-9):
    """Validate, compress to the support, canonicalize, build modular data
    and the dual family.  Returns all intermediate stages."""
    search = systems.invariant_states(sys_, tol=tol)
    comp_sys, comp_state, iso = systems.compress_to_support(
        sys_, search.mean_state, tol=tol)
    can = systems.canonicalize(comp_sys, comp_state, tol=tol)
    md = modular.modular_data(can, tol=tol)
    dual = modular.dual_system(md, tol=tol)
    return SimpleNamespace(
        sys=sys_, search=search, comp_sys=comp_sys, comp_state=comp_state,
        isometry=iso, can=can, md=md, dual=dual,
    )


@pytest.fixture(scope="session")
def aklt_pipeline():
    return build_pipeline(fixtures.aklt())


@pytest.fixture(scope="session")
def bernoulli_pipeline():
    return build_pipeline(fixtures.bernoulli_uniform())


@pytest.fixture(scope="session")
def random_pipelines():
    return [
        (seed, n, d, build_pipeline(fixtures.random_system(n, d, seed)))
        for seed, n, d in RANDOM_CASES
    ]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, name, ok, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d} [{status}] {name}: {detail}")
