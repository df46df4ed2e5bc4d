import pytest

from amalgam.algebra_fixtures import BIUNITARY_ORDER, biunitary_triangle, klein_in_dihedral_family
from amalgam.algebras import group_star_algebra
from amalgam.fock import GNSFactor, fock_space, generalized_reduced_amalgam, trace_state
from amalgam.groups import cyclic_group
from amalgam.relations import build_relation_algebra, discover_rules


@pytest.fixture(scope="session")
def biunitary():
    t = biunitary_triangle()
    t.validate()
    rules = discover_rules(t, BIUNITARY_ORDER)
    R, A = build_relation_algebra(t, rules, BIUNITARY_ORDER)
    return t, rules, R, A


@pytest.fixture(scope="session")
def z2_free():
    """(C[Z2], tau) * (C[Z2], tau) over the scalars, depth 4."""
    states = [trace_state(group_star_algebra(cyclic_group(2))) for _ in range(2)]
    F = fock_space([GNSFactor(s) for s in states], states[0].base, 4)
    return F, states


@pytest.fixture(scope="session")
def klein_family():
    phis, psis, B = klein_in_dihedral_family()
    R = generalized_reduced_amalgam(phis, psis, 2)
    return phis, psis, B, R


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, gathered from the recorded properties."""
    lines = []
    for reports in terminalreporter.stats.values():
        for rep in reports:
            if getattr(rep, "when", None) != "call":
                continue
            for key, value in getattr(rep, "user_properties", ()):
                if key == "criterion":
                    lines.append(value)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number, verdict, detail in sorted(lines):
            terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
