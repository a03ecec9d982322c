"""Shared fixtures: bundled artifacts are loaded once per session."""

from pathlib import Path

import pytest

from medreason.kb import expand_combinations, load_bundled_matrix, load_disease_matrix
from medreason.match import build_tfidf
from medreason.patients import load_patients
from medreason.predict import train_mnb
from medreason.rules import parse_rules

REPO = Path(__file__).resolve().parent.parent

TOY_CSV = """\
disease,fever,cough,rash,nausea
Flu,1,1,0,0
Measles,1,0,1,0
Food_Poisoning,0,0,1,1
"""

# verdict lines collected by the acceptance tests, echoed after the run
ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, verdict in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"{verdict}: {name}")


@pytest.fixture()
def record_criterion():
    def _record(name: str, passed: bool) -> None:
        verdict = "PASS" if passed else "FAIL"
        ACCEPTANCE_RESULTS.append((name, verdict))
        print(f"[acceptance] {verdict}: {name}")
    return _record


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO


@pytest.fixture(scope="session")
def matrix():
    return load_bundled_matrix()


@pytest.fixture(scope="session")
def index(matrix):
    return build_tfidf(matrix)


@pytest.fixture(scope="session")
def expanded(matrix):
    return expand_combinations(matrix)


@pytest.fixture(scope="session")
def mnb_model(expanded):
    # Trained on the full expansion; evaluation fixtures split separately.
    return train_mnb(expanded)


@pytest.fixture(scope="session")
def core_rules(repo_root):
    return parse_rules((repo_root / "rules" / "core.swrlx").read_text("utf-8"))


@pytest.fixture(scope="session")
def patient_220(repo_root):
    text = (repo_root / "fixtures" / "patient_220.json").read_text("utf-8")
    return load_patients(text)[0]


@pytest.fixture(scope="session")
def patient_chikungunya(repo_root):
    text = (repo_root / "fixtures" / "patient_chikungunya.json").read_text("utf-8")
    return load_patients(text)[0]


@pytest.fixture()
def toy_matrix():
    return load_disease_matrix(TOY_CSV)
