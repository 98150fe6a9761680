"""
Pytest fixtures for toral-mass tests
"""
import pytest
from toral_mass.tests.test_utils import get_test_config, get_test_sdk, cleanup


@pytest.fixture
def test_config():
    """Provide a single-threaded configuration"""
    return get_test_config()


@pytest.fixture
def sdk():
    """Provide an SDK instance"""
    instance = get_test_sdk()
    yield instance
    instance.close()


@pytest.fixture(autouse=True)
def reset_executors():
    """Reset the shared executor before and after each test"""
    cleanup()
    yield
    cleanup()
