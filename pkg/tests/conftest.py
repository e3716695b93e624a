"""Shared fixtures and the acceptance summary printed at the end of a run."""
import json

import pytest

ACCEPTANCE_LINES: list[str] = []


def report_line(line: str):
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def model_json(d, R=(), phi=(), S=(), theta=()):
    return json.dumps({"d": d, "R": [list(r) for r in R],
                       "phi": [[complex(v).real, complex(v).imag] for v in phi],
                       "S": [list(s) for s in S],
                       "theta": [[complex(v).real, complex(v).imag] for v in theta]})


@pytest.fixture
def model_files(tmp_path):
    """Model JSON files used by the CLI tests."""
    files = {
        "fo": model_json(2, [(1, 0), (0, 1), (1, 1)], [0.2, 0.2, 0.1]),
        "half": model_json(2, [(1, 0), (0, 1)], [0.5, 0.5]),
        "quarter": model_json(2, [(1, 0), (0, 1)], [0.25, 0.25]),
        "arma_half": model_json(2, [(1, 0), (0, 1)], [0.5, 0.5],
                                [(1, 0), (0, 1), (1, 1)], [-1, -1, 1]),
        "empty": model_json(2),
    }
    out = {}
    for name, text in files.items():
        p = tmp_path / f"{name}.json"
        p.write_text(text)
        out[name] = str(p)
    return out
