import numpy as np

from blockjacobi import random_operator

ACCEPTANCE_LINES: list[str] = []


def sweep_operator(seed: int, scale: float = 2.0):
    """Operator ``seed`` of the acceptance sweep: p in 1..6, m in 1..3."""
    rng = np.random.default_rng([seed, 0xB0B])
    p = int(rng.integers(1, 7))
    m = int(rng.integers(1, 4))
    return random_operator(seed, p, m, scale)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
