"""Shared fixtures"""

import numpy as np
import pytest

from app.services.results_storage import results_service


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def unit_circle():
    """Sample points on |z| = 1"""
    return np.exp(2j * np.pi * np.arange(97) / 97)


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    """Route bare output file names into a temporary results directory"""
    monkeypatch.setattr(results_service, "results_dir", tmp_path)
    return tmp_path
