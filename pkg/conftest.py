import os

import hypothesis
import numpy as np
import pytest

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=500, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))

# five features (rows) by nine observations
WAM_X = np.array([
    [0.12, 0.48, 0.65, 0.07, 0.37, 0.22, 0.29, 0.57, 0.84],
    [0.73, 0.41, 0.45, 0.79, 0.92, 0.23, 0.90, 0.40, 0.57],
    [0.43, 0.84, 0.70, 0.96, 0.81, 0.86, 0.72, 0.53, 0.42],
    [0.52, 0.75, 0.48, 0.40, 0.62, 0.28, 0.80, 0.92, 0.79],
    [0.69, 0.70, 0.24, 0.22, 0.92, 0.34, 0.15, 0.50, 0.50],
])
WAM_Y = np.array([0.58, 0.56, 0.70, 0.40, 0.78, 0.50, 0.64, 0.62, 0.73])
WQAM_SQUARE_Y = np.array([0.65, 0.58, 0.70, 0.51, 0.82, 0.56, 0.70, 0.64, 0.75])

HAMMING_STRINGS = [(2, 2, 3), (1, 3, 0), (3, 1, 0), (1, 1, 2), (2, 0, 0), (1, 2, 0)]


@pytest.fixture
def wam_data():
    from fusionkit.fitting import FitData
    return FitData(WAM_X.copy(), WAM_Y.copy())


@pytest.fixture
def wqam_square_data():
    from fusionkit.fitting import FitData
    return FitData(WAM_X.copy(), WQAM_SQUARE_Y.copy())


@pytest.fixture
def hamming_strings():
    return list(HAMMING_STRINGS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture(autouse=True)
def isolated_config(monkeypatch, tmp_path):
    """Every test sees the shipped defaults, never a developer's local overrides"""
    from fusionkit import fusion_config
    monkeypatch.setenv("FUSIONKIT_CONFIG", str(tmp_path / "no-local-config.json"))
    monkeypatch.delenv("FUSIONKIT_SEED", raising=False)
    monkeypatch.delenv("FUSIONKIT_LOG_LEVEL", raising=False)
    fusion_config.reload_fusion_config()
    yield
    fusion_config.reload_fusion_config()
