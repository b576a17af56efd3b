"""Shared fixtures for the lipscope tests.
"""

import os
import numpy as np
import pytest
from lipscope import config
from lipscope.network import Architecture, Network, sample_network
from lipscope.rng import stream_new
from lipscope.stability import REFERENCE_STATE_MATRIX, StabilitySystem, system_new

@pytest.fixture(autouse = True)
def isolated_config(tmp_path, monkeypatch):
    """Runs every test in an empty directory with no user, site, or
    global lipscope.toml in reach."""
    scopes = tmp_path / '_scopes'
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv('LIPSCOPE_SEED', raising = False)
    monkeypatch.delenv('LIPSCOPE_CONFIG_DIR', raising = False)
    monkeypatch.setattr(config, '_site_config', lambda path: None)
    monkeypatch.setattr(config, '_user_config',
        lambda path: os.sep.join([str(scopes), 'user', path]))
    monkeypatch.setattr(config, '_global_config',
        lambda path: os.sep.join([str(scopes), 'global', path]))
    return tmp_path

@pytest.fixture
def rng() -> np.random.Generator:
    """An independent numpy generator for building oracle inputs."""
    return np.random.default_rng(20240611)

@pytest.fixture(scope = 'session')
def reference_system() -> StabilitySystem:
    """The certificate of the reference state matrix with Q = I."""
    return system_new(REFERENCE_STATE_MATRIX)

@pytest.fixture
def small_relu_net() -> Network:
    """A sampled [2, 16, 16, 2] relu network."""
    return sample_network(Architecture((2, 16, 16, 2)), 1.0, 0.0, stream_new(7))
