import io
import os
from pathlib import Path

import numpy as np
import pytest

from xpmbounds import TwoPoleResponse, load_tabulated


def critical_csv_text(n=2048, span=20.0, omega0=1e15, prescale=1.0):
    """CSV sampling the critical-damping response, optionally pre-scaled."""
    t_fs = np.linspace(0.0, span, n)
    t = t_fs * 1e-15
    h = omega0 * omega0 * t * np.exp(-omega0 * t) * prescale
    lines = ["t_fs,h"] + [f"{a:.12g},{b:.12g}" for a, b in zip(t_fs, h)]
    return "\n".join(lines) + "\n"


@pytest.fixture(scope="session")
def critical_response():
    return TwoPoleResponse(1.0, 2.0)


@pytest.fixture(scope="session")
def tabulated_critical():
    """Critical-damping response ingested through the CSV path (omega0=1e15)."""
    return load_tabulated(io.StringIO(critical_csv_text()))


def raman_data_path():
    """User-supplied measured response file, if present (not shipped)."""
    env = os.environ.get("XPMBOUNDS_RAMAN_CSV")
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "raman_measured.csv"
