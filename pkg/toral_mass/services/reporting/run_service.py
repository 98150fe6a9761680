"""
Run service: executes one CLI subcommand and returns a response envelope

Each command builds its report from the spectral services, writes any side
files (point lists, tuples, samples), and records every written body in the
run manifest. Report bodies never contain timings, so identical inputs give
identical bytes.
"""
import json
import logging
import math
import platform
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Optional, TYPE_CHECKING

import numpy as np
import scipy

from ..spectral.base_service import BaseService
from .report_service import ReportTable, checksum, table_from_records
from ...exceptions import (
    ToralMassError,
    ToralValidationError,
    ToralBudgetError,
    ToralQuadratureError,
    ToralComputationError,
)
from ...models import (
    DiscrepancyMode,
    ExperimentConfig,
    LatticePointSet,
    MomentSummary,
    PairDistanceVariant,
    ReportFormat,
    RunManifest,
    CoefficientType,
    parse_fraction,
    parse_int,
    to_jsonable,
)

if TYPE_CHECKING:
    from ...backends.compute_backend import ComputeBackend

logger = logging.getLogger(__name__)

COMMANDS = ('lattice', 'correlations', 'flatness', 'variance', 'clt', 'restricted', 'pairdist', 'hypotheses', 'selftest')
MAX_GRID_POINTS = 100000


class ExperimentFileError(ToralMassError):
    """Experiment file missing or not valid JSON"""
    pass


@dataclass
class CommandResult:
    """Report data of one command plus the side files it wrote"""
    data: Dict[str, Any]
    outputs: Dict[str, str] = field(default_factory=dict)
    experiment: Optional[ExperimentConfig] = None
    passed: bool = True
    # written instead of the flattened fields when the report is CSV
    table: Optional[ReportTable] = None


def load_experiment(path: str, n: Optional[int] = None, seed: Optional[int] = None,
                    M: Optional[int] = None) -> ExperimentConfig:
    """
    Read an experiment JSON file, reals kept as decimals, with CLI overrides

    Raises:
        ExperimentFileError: The file cannot be read or parsed
        ToralValidationError: A field violates a precondition
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle, parse_float=Decimal)
    except OSError as e:
        raise ExperimentFileError(f"cannot read experiment file {path}: {e.strerror or str(e)}")
    except json.JSONDecodeError as e:
        raise ExperimentFileError(f"malformed JSON in {path}: line {e.lineno} column {e.colno}: {e.msg}")
    experiment = ExperimentConfig.from_dict(data)
    if n is not None or seed is not None or M is not None:
        experiment = experiment.with_overrides(n=n, seed=seed, M=M)
    return experiment


def parse_grid(text: str) -> List[Fraction]:
    """'start:stop:step' with an inclusive stop, read as exact rationals"""
    parts = str(text).split(':')
    if len(parts) != 3:
        raise ToralValidationError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (parse_fraction(p, 'grid') for p in parts)
    if step <= 0 or stop < start:
        raise ToralValidationError("grid needs step > 0 and stop >= start")
    count = math.floor((stop - start) / step) + 1
    if count > MAX_GRID_POINTS:
        raise ToralValidationError(f"grid has {count} points, at most {MAX_GRID_POINTS} allowed")
    return [start + i * step for i in range(count)]


def parse_point(text: Any, d: int, name: str) -> List[int]:
    values = text.split(',') if isinstance(text, str) else list(text)
    if len(values) != d:
        raise ToralValidationError(f"'{name}' must have {d} coordinates")
    return [parse_int(v, name) for v in values]


class RunService(BaseService):
    """Dispatches subcommands over the compute backend"""

    def __init__(self, backend: 'ComputeBackend'):
        super().__init__(backend.config)
        self.backend = backend

    # Side files

    def _write(self, result: CommandResult, results: Any, path: str, fmt: ReportFormat = ReportFormat.CSV):
        result.outputs[path] = self.backend.reports.emit_report(results, fmt, path)

    def _lattice_table(self, lattice: LatticePointSet) -> ReportTable:
        axes = ['x', 'y', 'z'][:lattice.d]
        columns = ['index'] + axes + (['angle'] if lattice.d == 2 else [])
        rows = []
        for i, point in enumerate(lattice.points.tolist()):
            row = [i] + point
            if lattice.d == 2:
                row.append(float(lattice.angles[i]))
            rows.append(row)
        return ReportTable(columns=columns, rows=rows)

    def _cap_mode(self, lattice: LatticePointSet, mode: Optional[str]) -> DiscrepancyMode:
        if mode is not None:
            return DiscrepancyMode(mode)
        if lattice.N <= self.config.get_exact_cap_bound():
            return DiscrepancyMode.EXACT
        return DiscrepancyMode.SAMPLED

    def _discrepancy(self, lattice: LatticePointSet, cap_mode: Optional[str] = None,
                     samples: int = 4096, seed: int = 0, eta: Optional[float] = None) -> Dict[str, Any]:
        lattices = self.backend.lattices
        if lattice.d == 2:
            return lattices.angular_discrepancy(lattice).to_dict()
        cap = lattices.spherical_cap_discrepancy(lattice, self._cap_mode(lattice, cap_mode), samples, seed)
        result = cap.to_dict()
        if eta is not None:
            result['ratio'] = lattices.cap_discrepancy_ratio(cap, lattice.n, eta)
        return result

    def _coefficients(self, experiment: ExperimentConfig):
        lattice = self.backend.lattices.enumerate_lattice_points(experiment.n, experiment.d)
        return self.backend.eigenfunctions.from_spec(lattice, experiment.coefficients)

    def _experiment_echo(self, experiment: ExperimentConfig, N: int) -> Dict[str, Any]:
        echo = experiment.to_dict()
        echo['N'] = N
        return echo

    # Commands

    def run_lattice(self, n: int, dim: int, discrepancy: bool = False,
                    cap_mode: Optional[str] = None, samples: int = 4096, seed: int = 0,
                    eta: Optional[float] = None, **_) -> CommandResult:
        lattices = self.backend.lattices
        lattice = lattices.enumerate_lattice_points(n, dim)
        data: Dict[str, Any] = lattice.to_dict(include_points=False)
        result = CommandResult(data=data, table=self._lattice_table(lattice))
        if discrepancy:
            if lattice.N == 0:
                raise ToralValidationError(f"E_{n} is empty in dimension {dim}")
            data['discrepancy'] = self._discrepancy(lattice, cap_mode, samples, seed, eta)
        return result

    def run_correlations(self, n: int, dim: int, l: int, K=None, delta=None, gamma: Optional[float] = None,
                         tuples: Optional[str] = None, **_) -> CommandResult:
        correlations = self.backend.correlations
        lattice = self.backend.lattices.enumerate_lattice_points(n, dim)
        report = correlations.correlation_report(lattice, l, K=K, delta=delta, gamma=gamma)
        result = CommandResult(data=report.to_dict())
        if tuples:
            columns = [f'i{j + 1}' for j in range(l)]
            rows = [list(t) for t in correlations.iter_correlation_tuples(lattice, l)]
            self._write(result, ReportTable(columns=columns, rows=rows), tuples)
        return result

    def run_flatness(self, config: str, eps: Optional[float] = None, eta: Optional[float] = None,
                     n: Optional[int] = None, **_) -> CommandResult:
        experiment = load_experiment(config, n=n)
        eigenfunctions = self.backend.eigenfunctions
        cv = self._coefficients(experiment)
        report = eigenfunctions.flatness_report(cv, epsilon=eps, T=experiment.T, eta=eta)
        data: Dict[str, Any] = {
            'experiment': self._experiment_echo(experiment, cv.N),
            'flatness': report.to_dict(),
            'predicted_variance': self.backend.mass.predict_variance_asymptotic(
                experiment.d, report.theta, experiment.r, experiment.T),
        }
        data.update(self._bv_prediction(experiment))
        return CommandResult(data=data, experiment=experiment)

    def _bv_prediction(self, experiment: ExperimentConfig) -> Dict[str, Any]:
        spec = experiment.coefficients
        if spec.get('type') != CoefficientType.BV.value:
            return {}
        g_l2 = self.backend.eigenfunctions.bv_l2_norm_squared(spec.get('breakpoints', []), spec.get('values', []))
        return {
            'bv_g_l2_squared': g_l2,
            'predicted_variance_bv': self.backend.mass.predict_variance_bv(g_l2, experiment.r, experiment.T),
        }

    def _exact_summary(self, experiment: ExperimentConfig, cv) -> MomentSummary:
        """Summary without sampling: exact and predicted values only"""
        mass = self.backend.mass
        r, T, d = experiment.r, experiment.T, experiment.d
        exact = mass.variance_exact_tuple(cv, r)
        theta = self.backend.eigenfunctions.flatness_report(cv).theta
        predicted = mass.predict_variance_asymptotic(d, theta, r, T)
        variance: Dict[str, Optional[float]] = {
            'spectral': mass.variance_spectral(cv, r),
            'exact_tuple': exact,
            'predicted_asymptotic': predicted,
            'ratio': exact / predicted if predicted > 0 else None,
        }
        if d == 3:
            variance['diagonal_difference'] = abs(exact - variance['spectral'])
        return MomentSummary(expectation={'exact': mass.expectation_exact(r, d)}, variance=variance)

    def run_variance(self, config: str, eps: Optional[float] = None, eta: Optional[float] = None,
                     n: Optional[int] = None, seed: Optional[int] = None, M: Optional[int] = None,
                     **_) -> CommandResult:
        experiment = load_experiment(config, n=n, seed=seed, M=M)
        if experiment.restriction is not None:
            raise ToralValidationError("variance runs on the full torus; use 'restricted' for a restriction")
        cv = self._coefficients(experiment)
        if experiment.mc is not None:
            summary, _, _, _ = self.backend.sampling.summarize(experiment, cv, with_clt=False)
        else:
            summary = self._exact_summary(experiment, cv)
        data: Dict[str, Any] = {
            'experiment': self._experiment_echo(experiment, cv.N),
            'summary': summary.to_dict(),
        }
        data.update(self._bv_prediction(experiment))
        if experiment.d == 3:
            data['diagonal_error'] = self.backend.mass.diagonal_error_ratio(cv, experiment.r)
        if eps is not None and eta is not None:
            data['bound_ratios'] = self.backend.mass.variance_bound_ratios(
                summary.variance['exact_tuple'], experiment.d, experiment.r, experiment.T,
                cv.N, experiment.n, eps, eta)
        return CommandResult(data=data, experiment=experiment)

    def _samples_table(self, centres: np.ndarray, masses: np.ndarray,
                       standardized: Optional[np.ndarray]) -> ReportTable:
        d = centres.shape[1]
        columns = ['index'] + [f'x{j + 1}' for j in range(d)] + ['X', 'X_standardized']
        rows = []
        for i in range(masses.shape[0]):
            z = float(standardized[i]) if standardized is not None else None
            rows.append([i] + centres[i].tolist() + [float(masses[i]), z])
        return ReportTable(columns=columns, rows=rows)

    def _sampled_run(self, experiment: ExperimentConfig, samples_out: Optional[str]) -> CommandResult:
        sampling = self.backend.sampling
        experiment.require_mc()
        cv = self._coefficients(experiment)
        summary, centres, masses, standardized = sampling.summarize(experiment, cv, with_clt=True)
        data: Dict[str, Any] = {
            'experiment': self._experiment_echo(experiment, cv.N),
            'summary': summary.to_dict(),
        }
        if standardized is not None and standardized.shape[0] >= 100:
            data['clt'] = sampling.clt_diagnostics(standardized).to_dict()
        result = CommandResult(data=data, experiment=experiment)
        if samples_out:
            self._write(result, self._samples_table(centres, masses, standardized), samples_out)
        return result

    def run_clt(self, config: str, samples_out: Optional[str] = None, n: Optional[int] = None,
                seed: Optional[int] = None, M: Optional[int] = None, **_) -> CommandResult:
        experiment = load_experiment(config, n=n, seed=seed, M=M)
        return self._sampled_run(experiment, samples_out)

    def run_restricted(self, config: str, samples_out: Optional[str] = None, n: Optional[int] = None,
                       seed: Optional[int] = None, M: Optional[int] = None, **_) -> CommandResult:
        experiment = load_experiment(config, n=n, seed=seed, M=M)
        if experiment.restriction is None:
            raise ToralValidationError("restricted needs a 'restriction' in the experiment")
        return self._sampled_run(experiment, samples_out)

    def run_pairdist(self, config: str, grid: str = '0:2:0.01', variant: Optional[str] = None,
                     lambda0: Optional[str] = None, n: Optional[int] = None, **_) -> CommandResult:
        experiment = load_experiment(config, n=n)
        pairs = self.backend.pair_distances
        if variant is None:
            variant = PairDistanceVariant.F if experiment.d == 2 else PairDistanceVariant.F3
        variant = PairDistanceVariant(variant)
        lattice = self.backend.lattices.enumerate_lattice_points(experiment.n, experiment.d)
        source = lattice
        point = None
        if variant is PairDistanceVariant.F:
            source = self.backend.eigenfunctions.from_spec(lattice, experiment.coefficients)
        elif variant is PairDistanceVariant.F_LAMBDA0:
            point = parse_point(lambda0, 2, 'lambda0') if lambda0 is not None else lattice.points[0].tolist()
        grid_points = parse_grid(grid)
        values = pairs.pair_distance_curve(source, grid_points, variant, point)
        rows = []
        for s, value in zip(grid_points, values.tolist()):
            rows.append({'s': float(s), 'value': value, 'reference': self._pair_reference(variant, float(s))})
        data: Dict[str, Any] = {
            'experiment': self._experiment_echo(experiment, lattice.N),
            'variant': variant.value,
            'curve': rows,
        }
        if point is not None:
            data['lambda0'] = point
        table = table_from_records(rows, columns=['s', 'value', 'reference'])
        return CommandResult(data=data, experiment=experiment, table=table)

    def _pair_reference(self, variant: PairDistanceVariant, s: float) -> float:
        """Uniform-measure law: s/pi, 2 asin(s/2)/pi, or s^2/4"""
        if variant is PairDistanceVariant.F:
            return s / math.pi
        if variant is PairDistanceVariant.F_LAMBDA0:
            return 2.0 * math.asin(min(1.0, s / 2.0)) / math.pi
        return s * s / 4.0

    def run_hypotheses(self, n: int, dim: int, eps: float, l: int, delta, gamma: Optional[float] = None,
                       eta: Optional[float] = None, **_) -> CommandResult:
        lattices = self.backend.lattices
        lattice = lattices.enumerate_lattice_points(n, dim)
        data: Dict[str, Any] = {'n': n, 'd': dim, 'N': lattice.N}
        if dim == 2:
            data['D'] = lattices.check_hypothesis_D(lattice, eps).to_dict()
        else:
            data['D'] = None
            data['cap_discrepancy'] = self._discrepancy(lattice, eta=eta)
        data['A'] = self.backend.correlations.check_hypothesis_A(lattice, l, delta).to_dict()
        if gamma is not None and l % 2 == 0:
            data['diagonal_domination'] = {
                'gamma': gamma,
                'margin': self.backend.correlations.check_diagonal_domination(lattice, l, gamma),
            }
        return CommandResult(data=data)

    def run_selftest(self, suite: str = 'all', **_) -> CommandResult:
        rows = self.backend.selftests.run(suite)
        failed = [row['name'] for row in rows if not row['passed']]
        data = {'suite': suite, 'checks': len(rows), 'failed': failed, 'results': rows}
        columns = ['suite', 'name', 'value', 'target', 'error', 'tolerance', 'passed']
        table = table_from_records(rows, columns=columns)
        return CommandResult(data=data, passed=not failed, table=table)

    # Envelope

    def _manifest(self, command: str, options: Dict[str, Any]) -> RunManifest:
        from ... import __version__
        runtime = {
            'python': platform.python_version(),
            'numpy': np.__version__,
            'scipy': scipy.__version__,
            'platform': platform.platform(),
        }
        return RunManifest.start(
            tool_version=__version__,
            command=command,
            config={'options': to_jsonable(options), 'settings': self.config.to_dict()},
            runtime=runtime,
            threads=self.config.get_threads(),
            seed=None,
        )

    def execute(self, command: str, options: Optional[Dict[str, Any]] = None, out: Optional[str] = None,
                manifest_path: Optional[str] = None) -> Dict[str, Any]:
        """
        Run one subcommand

        Args:
            command: One of COMMANDS
            options: Keyword options of the command
            out: Report path; csv for *.csv, json otherwise. Without it the
                body is returned for printing
            manifest_path: Where to write the run manifest

        Returns:
            {'success': True, 'data', 'body', 'checksums', 'manifest'} or an
            error envelope with errorCode INVALID_INPUT, BUDGET_EXCEEDED,
            CONFIG_ERROR, COMPUTATION_ERROR or SELFTEST_FAILED
        """
        options = dict(options or {})
        if command not in COMMANDS:
            return self._error_response(f"unknown subcommand: {command!r}", 'INVALID_INPUT')
        try:
            manifest = self._manifest(command, options)
            result: CommandResult = getattr(self, f'run_{command}')(**options)
            reports = self.backend.reports
            fmt = reports.format_for_path(out) if out else ReportFormat.JSON
            content = result.table if fmt is ReportFormat.CSV and result.table is not None else result.data
            body = reports.render(content, fmt)
            checksums = dict(result.outputs)
            if out:
                checksums[out] = reports.emit_report(content, fmt, out)
            else:
                checksums['report'] = checksum(body)

            if result.experiment is not None:
                manifest.config['experiment'] = to_jsonable(result.experiment.raw or result.experiment.to_dict())
                if result.experiment.mc is not None:
                    manifest.seed = result.experiment.mc.seed
            manifest.finish(checksums)
            if manifest_path:
                reports.emit_report(manifest.to_dict(), ReportFormat.JSON, manifest_path)

            if not result.passed:
                response = self._error_response("selftest failed: " + ", ".join(result.data['failed']),
                                                'SELFTEST_FAILED')
                response['data'] = to_jsonable(result.data)
                return response
            return self._success_response(
                data=to_jsonable(result.data),
                body=body.decode('utf-8'),
                checksums=checksums,
                manifest=manifest.to_dict(),
            )

        except ToralBudgetError as e:
            logger.error("%s: %s", command, e)
            response = self._error_response(str(e), 'BUDGET_EXCEEDED')
            response.update({'bound': e.bound, 'required': e.required})
            return response
        except ExperimentFileError as e:
            logger.error("%s: %s", command, e)
            return self._error_response(str(e), 'CONFIG_ERROR')
        except ToralValidationError as e:
            logger.error("%s: %s", command, e)
            return self._error_response(str(e), 'INVALID_INPUT')
        except (ToralQuadratureError, ToralComputationError) as e:
            logger.error("%s: %s", command, e)
            return self._error_response(str(e), 'COMPUTATION_ERROR')
        except ToralMassError as e:
            logger.error("%s: %s", command, e)
            return self._error_response(str(e), 'COMPUTATION_ERROR')
        except ValueError as e:
            # Config getters raise ValueError on a bad TORAL_MASS_THREADS
            logger.error("%s: %s", command, e)
            return self._error_response(str(e), 'CONFIG_ERROR')
