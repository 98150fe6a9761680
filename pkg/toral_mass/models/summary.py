"""
Result models: moment summaries, CLT diagnostics and run manifests
"""
import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Optional, Dict, Any, List

from dateutil import tz

from ..exceptions import ToralComputationError


def gaussian_moment(k: int) -> float:
    """(k-1)!! for even k, 0 for odd k"""
    if k % 2:
        return 0.0
    result = 1
    for j in range(k - 1, 0, -2):
        result *= j
    return float(result)


@dataclass
class MomentSummary:
    """
    Expectation, variance and standardised higher moments of one experiment

    standardized_moments maps k to {exact_tuple, mc, mc_stderr, gaussian_target};
    exact_tuple is None when the exact sum is out of budget or not defined.
    """
    expectation: Dict[str, Optional[float]]
    variance: Dict[str, Optional[float]]
    standardized_moments: Dict[int, Dict[str, Optional[float]]] = field(default_factory=dict)
    ks: Optional[Dict[str, Any]] = None
    sample_count: int = 0
    restricted: bool = False

    def __post_init__(self):
        for name in ('spectral', 'exact_tuple', 'mc'):
            value = self.variance.get(name)
            if value is not None and value < 0:
                raise ToralComputationError(f"variance invariant violated: {name} variance is negative")
        for k, entry in self.standardized_moments.items():
            if entry.get('gaussian_target') != gaussian_moment(int(k)):
                raise ToralComputationError(f"gaussian target of moment {k} is inconsistent")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'sample_count': self.sample_count,
            'restricted': self.restricted,
            'expectation': dict(self.expectation),
            'variance': dict(self.variance),
            'standardized_moments': {str(k): dict(v) for k, v in sorted(self.standardized_moments.items())},
            'ks': dict(self.ks) if self.ks is not None else None,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'MomentSummary':
        return cls(
            expectation=dict(data['expectation']),
            variance=dict(data['variance']),
            standardized_moments={int(k): dict(v) for k, v in data.get('standardized_moments', {}).items()},
            ks=dict(data['ks']) if data.get('ks') is not None else None,
            sample_count=int(data.get('sample_count', 0)),
            restricted=bool(data.get('restricted', False)),
        )


@dataclass
class CltDiagnostics:
    """Kolmogorov-Smirnov distance to N(0,1) and the empirical moment table"""
    ks_statistic: float
    sample_count: int
    moment_table: List[Dict[str, float]]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'ks_statistic': self.ks_statistic,
            'sample_count': self.sample_count,
            'moment_table': [dict(row) for row in self.moment_table],
        }


@dataclass
class RunManifest:
    """
    Reproducibility record of one CLI run

    Only started_at and wall_time_seconds vary between identical runs.
    """
    tool_version: str
    command: str
    config: Dict[str, Any]
    runtime: Dict[str, Any]
    threads: int
    seed: Optional[int]
    started_at: str = ''
    wall_time_seconds: float = 0.0
    checksums: Dict[str, str] = field(default_factory=dict)
    _clock: float = field(default=0.0, repr=False)

    @classmethod
    def start(cls, tool_version: str, command: str, config: Dict[str, Any], runtime: Dict[str, Any],
              threads: int, seed: Optional[int]) -> 'RunManifest':
        manifest = cls(
            tool_version=tool_version,
            command=command,
            config=config,
            runtime=runtime,
            threads=threads,
            seed=seed,
            started_at=datetime.now(tz.tzutc()).isoformat(),
        )
        manifest._clock = time.perf_counter()
        return manifest

    def finish(self, checksums: Dict[str, str]) -> 'RunManifest':
        self.checksums = dict(checksums)
        self.wall_time_seconds = time.perf_counter() - self._clock
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'tool_version': self.tool_version,
            'command': self.command,
            'config': self.config,
            'runtime': self.runtime,
            'threads': self.threads,
            'seed': self.seed,
            'started_at': self.started_at,
            'wall_time_seconds': self.wall_time_seconds,
            'checksums': dict(self.checksums),
        }
