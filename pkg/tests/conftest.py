import pytest

from corpus_forge.langid import LangPrediction
from corpus_forge.synthetic import generate_corpus


class FixedClassifier:
    """Returns the same prediction for every text."""

    def __init__(self, language="mk", confidence=0.99):
        self.prediction = LangPrediction(language, confidence)

    def predict(self, text):
        return self.prediction


@pytest.fixture
def fixed_classifier():
    return FixedClassifier


@pytest.fixture(scope="session")
def small_corpus():
    return generate_corpus(300_000, seed=7)


# -- acceptance summary -------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    details = [text for key, text in report.sections if key == "Captured stdout call"]
    _CRITERIA[number] = (title, report.outcome, "".join(details).strip())


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcome, detail = _CRITERIA[number]
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{status}] {number:>2}. {title}"
        if detail:
            line += f" -- {detail.splitlines()[-1]}"
        terminalreporter.write_line(line)
