"""
Scenario files, sweep evaluation, figure recipes and CSV output.

A scenario is a line-oriented ``key = value`` file with ``#`` comments:

    rho_db = 30
    d_se = 40          # Eve distances in meters
    sweep = a_s, 0.02, 0.48, 0.02

Missing keys take the baseline values (10/10/15 m, nu = 3, rho_si = -10 dB,
a_s = a_r = 0.2). Sweep points run as Celery tasks and are assembled in
sweep order, so every table is a pure function of its inputs and seed.
"""
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from django.conf import settings

from apps.montecarlo.services import secrecy_mode_a, secrecy_mode_a_std_err, simulate
from apps.optimizer.services import compare_allocations
from apps.secrecy.services import analyze
from apps.system_model.services import SystemParams, Topology, build_params
from config import __version__

from .exceptions import ScenarioParseError
from .serializers import ScenarioSerializer

logger = logging.getLogger(__name__)

FIGURES = (2, 3, 4, 5, 6, 7)

# Eve geometries (d_se, d_re) in meters
FAR_EVE = (40.0, 30.0)
MID_EVE = (30.0, 20.0)
NEAR_EVE = (25.0, 20.0)

ALLOCATION_SWEEP = (0.02, 0.48, 0.02)
FIXED_ALLOCATION = 0.14

ALIASES = {'n': 'n_realizations', 'mode': 'mc_mode'}

SCENARIO_COLUMNS = ['rho_db', 'rho_si_db', 'd_se', 'd_re', 'a_s', 'a_r']
ANALYTICAL_COLUMNS = ['c_d1', 'c_d2', 'ce_d1', 'ce_d2_ub', 'sec_lb', 'sum_capacity']
SIMULATED_COLUMNS = [
    'mc_c_d1', 'mc_c_d2', 'mc_ce_d1', 'mc_ce_d2',
    'mc_mode_a', 'mc_mode_a_se', 'mc_mode_b', 'mc_mode_b_se',
    'mc_ssr', 'mc_ssr_se',
]
COMPARISON_COLUMNS = [
    'geometry', 'd_se', 'd_re', 'n',
    'ssrot_mean', 'ssrot_se', 'fpapt_mean', 'fpapt_se', 'gain_mean', 'gain_se', 'converged_fraction',
]
REALIZATION_COLUMNS = ['geometry', 'd_se', 'd_re', 'index', 'ssrot', 'fpapt', 'a_s', 'a_r', 'iterations', 'converged']
PROVENANCE_COLUMNS = ['seed', 'n_realizations', 'version']


@dataclass(frozen=True)
class Scenario:
    rho_db: float = 30.0
    rho_si_db: float = -10.0
    nu: float = 3.0
    d_sr: float = 10.0
    d_rd1: float = 10.0
    d_rd2: float = 15.0
    d_se: float = FAR_EVE[0]
    d_re: float = FAR_EVE[1]
    a_s: float = 0.2
    a_r: float = 0.2
    sigma_si_sq: float = 1.0
    n_realizations: Optional[int] = None
    seed: Optional[int] = None
    mc_mode: str = 'a'
    sweep: Optional[Tuple[str, float, float, float]] = None

    def __post_init__(self):
        if self.n_realizations is None:
            object.__setattr__(self, 'n_realizations', settings.MC_ANALYSIS_REALIZATIONS)
        if self.seed is None:
            object.__setattr__(self, 'seed', settings.DEFAULT_SEED)
        if self.sweep is not None:
            object.__setattr__(self, 'sweep', tuple(self.sweep))

    @classmethod
    def from_dict(cls, data: Dict) -> 'Scenario':
        return cls(**data)


@dataclass
class ResultTable:
    """Rectangular result rows in a fixed column order, plus provenance"""

    columns: List[str]
    rows: List[Dict] = field(default_factory=list)
    seed: int = 0
    n: int = 0
    version: str = __version__

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows, columns=self.columns)
        frame['seed'] = self.seed
        frame['n_realizations'] = self.n
        frame['version'] = self.version
        return frame


_FIELD_TYPES = {
    name: float for name in
    ('rho_db', 'rho_si_db', 'nu', 'd_sr', 'd_rd1', 'd_rd2', 'd_se', 'd_re', 'a_s', 'a_r', 'sigma_si_sq')
}
_FIELD_TYPES.update(n_realizations=int, seed=int, mc_mode=str, sweep=tuple)


def _to_int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f'{text!r} is not an integer')
    return int(value)


def _convert(name: str, text: str):
    kind = _FIELD_TYPES[name]
    if kind is float:
        return float(text)
    if kind is int:
        return _to_int(text)
    if kind is tuple:
        parts = [part.strip() for part in text.split(',')]
        if len(parts) != 4:
            raise ValueError('sweep needs field, start, stop, step')
        return (ALIASES.get(parts[0], parts[0]), *(float(p) for p in parts[1:]))
    return text.strip()


def parse_overrides(text: str) -> Tuple[Dict, Dict[str, int]]:
    """
    Read ``key = value`` lines without applying defaults.

    Returns:
        (values by field, line number of each field)
    """
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        if not sep:
            raise ScenarioParseError('expected "key = value"', line=lineno)
        key = ALIASES.get(key.strip(), key.strip())
        if key not in _FIELD_TYPES:
            raise ScenarioParseError(f'unknown key {key!r}', line=lineno, field=key)
        try:
            values[key] = _convert(key, value.strip())
        except ValueError as exc:
            raise ScenarioParseError(f'cannot parse {key}: {exc}', line=lineno, field=key) from exc
        lines[key] = lineno
    return values, lines


def validate_scenario(scenario: Scenario, lines: Dict[str, int] = None) -> Scenario:
    serializer = ScenarioSerializer(data=asdict(scenario))
    if not serializer.is_valid():
        name, messages = next(iter(serializer.errors.items()))
        if name == 'non_field_errors':
            name = None
        line = (lines or {}).get(name)
        raise ScenarioParseError(f'{name}: {messages[0]}', line=line, field=name)
    return scenario


def parse_scenario(text: str) -> Scenario:
    values, lines = parse_overrides(text)
    return validate_scenario(Scenario(**values), lines)


def scenario_params(scenario: Scenario) -> SystemParams:
    topology = Topology(
        d_sr=scenario.d_sr,
        d_rd1=scenario.d_rd1,
        d_rd2=scenario.d_rd2,
        d_se=scenario.d_se,
        d_re=scenario.d_re,
    )
    return build_params(
        scenario.rho_db,
        scenario.rho_si_db,
        topology,
        a_s=scenario.a_s,
        a_r=scenario.a_r,
        nu=scenario.nu,
        var_si=scenario.sigma_si_sq,
    )


def sweep_values(start: float, stop: float, step: float) -> List[float]:
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def sweep_points(scenario: Scenario) -> List[Scenario]:
    """One scenario per sweep value, or the scenario itself"""
    if scenario.sweep is None:
        return [scenario]
    name, start, stop, step = scenario.sweep
    return [replace(scenario, sweep=None, **{name: value}) for value in sweep_values(start, stop, step)]


def evaluate_point(scenario: Scenario, analytical: bool = True, simulated: bool = True, workers: int = None) -> Dict:
    """Analytical and/or Monte Carlo columns of one sweep point"""
    params = scenario_params(scenario)
    row = {name: getattr(scenario, name) for name in SCENARIO_COLUMNS}
    if analytical:
        report = analyze(params)
        row.update(
            c_d1=report.c_d1,
            c_d2=report.c_d2,
            ce_d1=report.ce_d1,
            ce_d2_ub=report.ce_d2_ub,
            sec_lb=report.sec_lb,
            sum_capacity=report.sum_capacity,
        )
    if simulated:
        result = simulate(params, scenario.n_realizations, scenario.seed, workers=workers)
        terms = result.terms
        mode_a, mode_a_se = secrecy_mode_a(terms), secrecy_mode_a_std_err(terms)
        row.update(
            mc_c_d1=terms.c_d1.mean,
            mc_c_d2=terms.c_d2.mean,
            mc_ce_d1=terms.ce_d1.mean,
            mc_ce_d2=terms.ce_d2.mean,
            mc_mode_a=mode_a,
            mc_mode_a_se=mode_a_se,
            mc_mode_b=result.mode_b.mean,
            mc_mode_b_se=result.mode_b.std_err,
        )
        if scenario.mc_mode == 'a':
            row.update(mc_ssr=mode_a, mc_ssr_se=mode_a_se)
        else:
            row.update(mc_ssr=result.mode_b.mean, mc_ssr_se=result.mode_b.std_err)
    return row


def _mean_and_se(values: np.ndarray) -> Tuple[float, float]:
    if values.size < 2:
        return float(values.mean()), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def compare_geometry(
    scenario: Scenario,
    geometry: str,
    per_realization: bool = False,
    workers: int = None,
) -> List[Dict]:
    """SSROT against FPAPT for one Eve geometry: a summary row or one row per realization"""
    comparisons = compare_allocations(
        scenario_params(scenario), scenario.n_realizations, scenario.seed, workers=workers,
    )
    labels = {'geometry': geometry, 'd_se': scenario.d_se, 'd_re': scenario.d_re}
    if per_realization:
        return [{**labels, **asdict(row)} for row in comparisons]

    ssrot = np.array([row.ssrot for row in comparisons])
    fpapt = np.array([row.fpapt for row in comparisons])
    ssrot_mean, ssrot_se = _mean_and_se(ssrot)
    fpapt_mean, fpapt_se = _mean_and_se(fpapt)
    gain_mean, gain_se = _mean_and_se(ssrot - fpapt)
    return [{
        **labels,
        'n': len(comparisons),
        'ssrot_mean': ssrot_mean,
        'ssrot_se': ssrot_se,
        'fpapt_mean': fpapt_mean,
        'fpapt_se': fpapt_se,
        'gain_mean': gain_mean,
        'gain_se': gain_se,
        'converged_fraction': float(np.mean([row.converged for row in comparisons])),
    }]


def _run_points(points: List[Tuple[Dict, Scenario]], analytical: bool, simulated: bool, workers: int = None) -> List[Dict]:
    from .tasks import run_points

    rows = run_points([scenario for _, scenario in points], analytical, simulated, workers)
    return [{**labels, **row} for (labels, _), row in zip(points, rows)]


def comparison_table(scenario: Scenario, geometries, per_realization: bool = False, workers: int = None) -> ResultTable:
    """SSROT against FPAPT for each (label, (d_se, d_re)) geometry"""
    from .tasks import run_comparisons

    jobs = [(label, replace(scenario, d_se=d_se, d_re=d_re)) for label, (d_se, d_re) in geometries]
    rows = [row for group_rows in run_comparisons(jobs, per_realization, workers) for row in group_rows]
    columns = REALIZATION_COLUMNS if per_realization else COMPARISON_COLUMNS
    return ResultTable(columns=columns, rows=rows, seed=scenario.seed, n=scenario.n_realizations)


def sweep_table(scenario: Scenario, analytical: bool = True, simulated: bool = True, workers: int = None) -> ResultTable:
    """Evaluate every point of a scenario's sweep"""
    columns = list(SCENARIO_COLUMNS)
    if analytical:
        columns += ANALYTICAL_COLUMNS
    if simulated:
        columns += SIMULATED_COLUMNS
    rows = _run_points([({}, point) for point in sweep_points(scenario)], analytical, simulated, workers)
    return ResultTable(columns=columns, rows=rows, seed=scenario.seed, n=scenario.n_realizations)


def _allocation_points(base: Scenario) -> List[Tuple[Dict, Scenario]]:
    points = []
    for swept, fixed in (('a_s', 'a_r'), ('a_r', 'a_s')):
        for value in sweep_values(*ALLOCATION_SWEEP):
            points.append(({'swept': swept}, replace(base, **{swept: value, fixed: FIXED_ALLOCATION})))
    return points


def _figure_points(figure_id: int, base: Scenario) -> Tuple[List[str], List[Tuple[Dict, Scenario]]]:
    if figure_id == 2:
        return ['swept'], _allocation_points(replace(base, rho_db=30.0))
    if figure_id == 3:
        return ['swept'], _allocation_points(replace(base, rho_db=10.0))
    if figure_id == 4:
        points = [
            ({}, replace(base, d_se=d_se, d_re=d_se / 2.0, a_s=0.2, a_r=0.2))
            for d_se in sweep_values(10.0, 200.0, 10.0)
        ]
        return [], points
    if figure_id == 5:
        points = [
            ({'geometry': label}, replace(base, rho_db=rho_db, d_se=d_se, d_re=d_re))
            for label, (d_se, d_re) in (('near', NEAR_EVE), ('mid', MID_EVE), ('far', FAR_EVE))
            for rho_db in sweep_values(0.0, 40.0, 2.0)
        ]
        return ['geometry'], points
    if figure_id == 6:
        points = [
            ({'si_suppression_db': base.rho_db - rho_si_db}, replace(base, rho_si_db=rho_si_db))
            for rho_si_db in sweep_values(-30.0, 10.0, 2.0)
        ]
        return ['si_suppression_db'], points
    raise ValueError(f'no sweep recipe for figure {figure_id}')


def run_figure(
    figure_id: int,
    overrides: Dict = None,
    workers: int = None,
    per_realization: bool = False,
) -> ResultTable:
    """
    Reproduce one figure as a table.

    Args:
        figure_id: 2-7
        overrides: Scenario fields replacing the recipe's baseline (e.g. seed,
            n_realizations, mc_mode, rho_si_db); the swept field always follows the recipe
        workers: Monte Carlo threads per sweep point; optimizer processes for figure 7
        per_realization: Figure 7 only; one row per channel realization
    """
    if figure_id not in FIGURES:
        raise ValueError(f'figure must be one of {FIGURES}, got {figure_id!r}')
    overrides = dict(overrides or {})
    if figure_id == 7:
        overrides.setdefault('n_realizations', settings.MC_OPTIMIZER_REALIZATIONS)
    base = validate_scenario(Scenario(**overrides))
    logger.info('figure %d: n=%d seed=%d', figure_id, base.n_realizations, base.seed)

    if figure_id == 7:
        return comparison_table(base, (('far', FAR_EVE), ('near', NEAR_EVE)), per_realization, workers)

    labels, points = _figure_points(figure_id, base)
    rows = _run_points(points, analytical=True, simulated=True, workers=workers)
    table = ResultTable(
        columns=labels + SCENARIO_COLUMNS + ANALYTICAL_COLUMNS + SIMULATED_COLUMNS,
        rows=rows,
        seed=base.seed,
        n=base.n_realizations,
    )
    best = best_row(table, 'sec_lb')
    logger.info('figure %d: best sec_lb %.6f at %s', figure_id, best['sec_lb'],
                {name: best[name] for name in SCENARIO_COLUMNS})
    return table


def best_row(table: ResultTable, column: str) -> Dict:
    """Row maximizing ``column``; the first one on ties"""
    if not table.rows:
        raise ValueError('table has no rows')
    if column not in table.columns:
        raise KeyError(column)
    return max(table.rows, key=lambda row: row[column])


def write_csv(table: ResultTable, path=None) -> Optional[str]:
    """
    Serialize ``table`` with a header row and LF line endings.

    Reals carry CSV_SIGNIFICANT_DIGITS significant digits. Returns the text
    when ``path`` is None.
    """
    return table.to_frame().to_csv(
        path,
        index=False,
        float_format=f'%.{settings.CSV_SIGNIFICANT_DIGITS}g',
        lineterminator='\n',
    )

