import math

import numpy as np
import pytest

from meanmotion import OscillatorSum, check_resonance

EXAMPLE_AMPS = (1.0, 2.5, 3.0)
EXAMPLE_FREQS = (math.sqrt(2), 3.0, math.sqrt(3))
EXAMPLE_OMEGA = 2.0614


def random_sum(rng, m, amp_range=(0.5, 3.0), freq_range=(0.5, 3.0), non_resonant=True):
    """Random oscillator sum with random phases; redraws until no integer relation with |l_k| <= 10."""
    while True:
        mod = rng.uniform(*amp_range, size=m)
        phase = rng.uniform(0, 2 * np.pi, size=m)
        lam = rng.uniform(*freq_range, size=m)
        if m > 1 and np.min(np.diff(np.sort(lam))) < 0.05:
            continue
        if non_resonant and m > 1 and not check_resonance(lam, 10 if m <= 4 else 6).non_resonant:
            continue
        return OscillatorSum(mod * np.exp(1j * phase), lam)


@pytest.fixture
def example_sum():
    return OscillatorSum(np.array(EXAMPLE_AMPS, dtype=complex), EXAMPLE_FREQS)


ACCEPTANCE_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    label = marker.args[0]
    ACCEPTANCE_RESULTS[label] = ACCEPTANCE_RESULTS.get(label, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS, key=lambda s: (int(s.split()[0].rstrip("ab")), s)):
        terminalreporter.write_line(f"{'PASS' if ACCEPTANCE_RESULTS[label] else 'FAIL'}  {label}")
