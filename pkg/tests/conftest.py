import numpy as np
import pytest

from leaklab import ChainConfigs, MetricConfig, SemanticLabel, preset_profiles


@pytest.fixture(scope="session")
def presets():
    return preset_profiles()


@pytest.fixture
def video_label():
    return SemanticLabel(id=0, name="video", prior=0.5)


@pytest.fixture
def web_label():
    return SemanticLabel(id=1, name="web", prior=0.5)


@pytest.fixture
def metric():
    return MetricConfig()


@pytest.fixture
def default_configs():
    return ChainConfigs()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
