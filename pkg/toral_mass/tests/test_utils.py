"""
Test utilities: configurations, SDK instances and experiment files
"""
import copy
import json
import os
from typing import Any, Dict, Sequence

import numpy as np

from toral_mass.config import Config
from toral_mass.executors import reset_executor
from toral_mass.models import CoefficientVector
from toral_mass.sdk import ToralMassSDK

BOURGAIN_EXPERIMENT: Dict[str, Any] = {
    'n': 25,
    'd': 2,
    'coefficients': {'type': 'bourgain', 'seed': 1},
    'r': '0.1',
    'mc': {'M': 400, 'seed': 3, 'batch': 128},
    'moments_upto': 4,
}


def get_test_config(**overrides) -> Config:
    """
    Get a single-threaded configuration for testing

    Returns:
        Config instance with the given overrides applied
    """
    settings: Dict[str, Any] = {'threads': 1}
    settings.update(overrides)
    return Config(settings)


def get_test_sdk(**overrides) -> ToralMassSDK:
    """Get an SDK instance over get_test_config"""
    settings: Dict[str, Any] = {'threads': 1}
    settings.update(overrides)
    return ToralMassSDK.initialize(settings)


def experiment(**changes) -> Dict[str, Any]:
    """The Bourgain experiment on E_25 with top-level fields replaced; None removes a field"""
    data = copy.deepcopy(BOURGAIN_EXPERIMENT)
    data.update(changes)
    return {key: value for key, value in data.items() if value is not None}


def write_experiment(directory: str, data: Dict[str, Any], name: str = 'experiment.json') -> str:
    """Write an experiment file and return its path"""
    path = os.path.join(directory, name)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(data, handle)
    return path


def translated(cv: CoefficientVector, shift: Sequence[float]) -> CoefficientVector:
    """Coefficients c_lambda e(<lambda, shift>) of x -> f(x + shift)"""
    phases = np.exp(2j * np.pi * (cv.lattice.points @ np.asarray(shift, dtype=np.float64)))
    coeffs = cv.coeffs * phases
    coeffs = (coeffs + np.conj(coeffs[cv.lattice.antipodes])) / 2.0
    return CoefficientVector(lattice=cv.lattice, coeffs=coeffs, kind=cv.kind)


def cleanup():
    """Reset the shared executors for testing"""
    reset_executor()
