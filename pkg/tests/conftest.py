"""Pytest configuration and shared fixtures."""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src directory to path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale training and many-seed checks")


@pytest.fixture
def mock_settings():
    """Application settings for tests."""
    from config.settings import Settings

    return Settings(log_level="DEBUG", log_format="console", environment="testing")


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_generator_config():
    """Small generator used for shape and gradient tests."""
    from fgfgan import GeneratorConfig
    from guided_filter import FilterParams

    return GeneratorConfig(bands=2, k_layers=2, width=4, sus=2, filter=FilterParams(r=1, eps=1e-2))


@pytest.fixture
def landsat_config():
    """Default layout at the Landsat8 band count (10)."""
    from fgfgan import GeneratorConfig

    return GeneratorConfig(bands=10, k_layers=4, width=32, sus=2)


@pytest.fixture
def synthetic_splits():
    """Small synthetic train/val/test datasets (C=2, sus=2, 8x8 LR patches)."""
    from fgfgan import synthetic_dataset
    from image_core import DatasetSpec

    spec = DatasetSpec(sus=2, bands=2, split=(8, 4, 4), patch=8, seed=3)
    return synthetic_dataset(spec, 16)


@pytest.fixture
def scene_pair():
    """A synthetic (ms, pan) scene pair with ms 4x32x32 and pan 1x64x64."""
    from image_core import synth_scene

    return synth_scene(7, 4, 64, 64, 2)


@pytest.fixture(autouse=True)
def quiet_structlog():
    """Route log events nowhere so command output can be asserted on."""
    import structlog

    structlog.configure(logger_factory=structlog.ReturnLoggerFactory())
    yield
    structlog.reset_defaults()
