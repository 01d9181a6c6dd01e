import pytest

CRITERIA = range(1, 11)
_results: dict = {}


class Recorder:
    def __init__(self, number: int):
        self.number = number
        self.parts = []

    def check(self, passed: bool, detail: str) -> bool:
        self.parts.append((bool(passed), detail))
        return bool(passed)

    def finish(self):
        ok = all(p for p, _ in self.parts)
        _results[self.number] = (ok, "; ".join(d for _, d in self.parts))
        failed = [d for p, d in self.parts if not p]
        assert ok, "; ".join(failed)


@pytest.fixture
def criterion(request):
    number = request.node.get_closest_marker("criterion").args[0]
    rec = Recorder(number)
    yield rec
    if number not in _results:
        _results[number] = (False, "did not complete: " + "; ".join(d for _, d in rec.parts))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in CRITERIA:
        if n in _results:
            ok, detail = _results[n]
            terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        else:
            terminalreporter.write_line(f"criterion {n}: NOT RUN")
