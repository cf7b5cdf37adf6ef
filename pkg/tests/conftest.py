import pytest

_RESULTS: dict[int, tuple[str, float, float, bool]] = {}


class Recorder:
    def record(self, number: int, name: str, max_err: float, tol: float) -> bool:
        ok = bool(max_err <= tol)
        _RESULTS[number] = (name, float(max_err), tol, ok)
        print(f"criterion {number:2d} {name:<34} max_err={max_err:.3e} tol={tol:.0e} {'PASS' if ok else 'FAIL'}")
        return ok


@pytest.fixture(scope="session")
def acceptance() -> Recorder:
    return Recorder()


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        name, err, tol, ok = _RESULTS[number]
        terminalreporter.write_line(
            f"criterion {number:2d} {name:<34} max_err={err:.3e} tol={tol:.0e} {'PASS' if ok else 'FAIL'}"
        )
