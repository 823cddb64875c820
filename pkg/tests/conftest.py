import pytest

CRITERIA = {
    'C1': 'iteration counts, sign n=50 symplectic cond 80',
    'C2': 'observed convergence orders',
    'C3': 'structure preservation of complex-step iterates',
    'C4': 'complex-step vs coupled agreement',
    'C5': 'complex-step derivative vs Sylvester derivative',
    'C6': 'Sylvester solver residual certification',
    'C7': 'identity cross-checks',
    'C8': 'second derivative symmetry and finite differences',
    'C9': 'byte-identical CSV output',
}

_results = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the closing report."""
    def record(key, passed, detail):
        _results[key] = (bool(passed), detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section('acceptance criteria')
    for key, title in CRITERIA.items():
        if key in _results:
            passed, detail = _results[key]
            tr.write_line(f'{key} {"PASS" if passed else "FAIL"}  {title}: '
                          f'{detail}')
        else:
            tr.write_line(f'{key} FAIL  {title}: no result recorded')
