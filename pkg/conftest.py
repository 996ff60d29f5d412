"""
Shared pytest fixtures
"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from models.forms import builtin_family, builtin_form  # noqa: E402
from models.harper import HarperConfig  # noqa: E402


@pytest.fixture(scope='session')
def delta():
    return builtin_form('delta12', 2000)


@pytest.fixture(scope='session')
def level11():
    return builtin_form('level11_weight2', 2000)


@pytest.fixture(scope='session')
def level1_family():
    return builtin_family('level1', 1000)


@pytest.fixture(scope='session')
def harper_cfg():
    return HarperConfig(N=10**6)
