import pytest

from vbsmpe import fixture_path, load_evidence, load_model

REFERENCE_BEST = ("a1", "b1", "c2", "d2", "e1", "f1", "g2", "h1", "i2", "j2")
REFERENCE_OBJECTIVE = 0.01100484


@pytest.fixture(scope="session")
def tables12():
    return load_model(fixture_path("tables12.json"))


@pytest.fixture(scope="session")
def ev_hgja(tables12):
    return load_evidence(fixture_path("evidence_hgja.json"), tables12)


@pytest.fixture(scope="session")
def ev_hfgja(tables12):
    return load_evidence(fixture_path("evidence_hfgja.json"), tables12)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::test_criterion" in getattr(rep, "nodeid", "") and rep.when == "call":
                rows.append((rep.nodeid.split("::")[-1], "PASS" if outcome == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(rows, key=lambda r: int(r[0].split("_")[2])):
            terminalreporter.write_line(f"{status}  {name}")
