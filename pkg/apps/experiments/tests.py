"""
Tests for scenario parsing, figure recipes, CSV output and the commands
"""
from io import StringIO

import numpy as np
import pytest
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError

from .exceptions import ScenarioParseError
from .services import (
    ResultTable,
    Scenario,
    best_row,
    evaluate_point,
    parse_scenario,
    run_figure,
    sweep_points,
    sweep_table,
    sweep_values,
    write_csv,
)

FIG2_SCENARIO = """
# high-SNR allocation sweep
rho_db = 30
sweep = a_s, 0.02, 0.48, 0.02
"""


class TestParseScenario:
    """Test scenario files"""

    def test_empty_file_gives_baseline(self):
        scenario = parse_scenario('')
        assert (scenario.d_sr, scenario.d_rd1, scenario.d_rd2) == (10.0, 10.0, 15.0)
        assert scenario.nu == 3.0
        assert scenario.rho_si_db == -10.0
        assert scenario.a_s == scenario.a_r == 0.2
        assert scenario.sigma_si_sq == 1.0
        assert scenario.n_realizations == settings.MC_ANALYSIS_REALIZATIONS
        assert scenario.mc_mode == 'a'
        assert scenario.sweep is None

    def test_sweep_scenario(self):
        scenario = parse_scenario(FIG2_SCENARIO)
        assert scenario.rho_db == 30.0
        assert scenario.sweep == ('a_s', 0.02, 0.48, 0.02)
        points = sweep_points(scenario)
        assert len(points) == 24
        assert points[0].a_s == 0.02 and points[-1].a_s == 0.48

    def test_aliases_and_comments(self):
        scenario = parse_scenario('n = 1e4   # short run\n\nmode = b\nseed = 7\n')
        assert scenario.n_realizations == 10_000
        assert scenario.mc_mode == 'b'
        assert scenario.seed == 7

    def test_allocation_out_of_range(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            parse_scenario('rho_db = 30\na_s = 0.7\n')
        assert excinfo.value.field == 'a_s'
        assert excinfo.value.line == 2

    def test_unknown_key(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            parse_scenario('\nbandwidth = 10\n')
        assert excinfo.value.line == 2
        assert excinfo.value.field == 'bandwidth'

    @pytest.mark.parametrize('text', ['rho_db = loud', 'n = 1.5', 'rho_db 30', 'sweep = a_s, 0.1'])
    def test_unparsable(self, text):
        with pytest.raises(ScenarioParseError) as excinfo:
            parse_scenario(text)
        assert excinfo.value.line == 1

    def test_non_positive_distance(self):
        with pytest.raises(ScenarioParseError) as excinfo:
            parse_scenario('d_se = 0')
        assert excinfo.value.field == 'd_se'

    def test_sweep_of_unknown_field(self):
        with pytest.raises(ScenarioParseError):
            parse_scenario('sweep = d_sr, 1, 2, 0.5')

    def test_sweep_values(self):
        assert sweep_values(-30.0, 10.0, 2.0)[-1] == 10.0
        assert len(sweep_values(10.0, 200.0, 10.0)) == 20
        assert sweep_values(0.02, 0.48, 0.02)[2] == 0.06


class TestWriteCsv:
    """Test CSV serialization"""

    def test_empty_table_is_header_only(self, tmp_path):
        path = tmp_path / 'empty.csv'
        write_csv(ResultTable(columns=['a_s', 'sec_lb'], seed=1, n=2), path)
        assert path.read_bytes() == b'a_s,sec_lb,seed,n_realizations,version\n'

    def test_significant_digits_and_line_endings(self):
        table = ResultTable(columns=['x'], rows=[{'x': 1 / 3}], seed=5, n=100, version='1.0.0')
        assert write_csv(table) == 'x,seed,n_realizations,version\n0.333333333333,5,100,1.0.0\n'

    def test_identical_bytes(self, tmp_path):
        table = ResultTable(columns=['x', 'y'], rows=[{'x': 0.1, 'y': 2.0}, {'x': 0.2, 'y': 1.0}])
        write_csv(table, tmp_path / 'first.csv')
        write_csv(table, tmp_path / 'second.csv')
        assert (tmp_path / 'first.csv').read_bytes() == (tmp_path / 'second.csv').read_bytes()


class TestBestRow:
    """Test the sweep-maximum lookup"""

    def test_first_maximum(self):
        table = ResultTable(columns=['a_s', 'sec_lb'], rows=[
            {'a_s': 0.1, 'sec_lb': 1.0}, {'a_s': 0.2, 'sec_lb': 3.0}, {'a_s': 0.3, 'sec_lb': 3.0},
        ])
        assert best_row(table, 'sec_lb')['a_s'] == 0.2

    def test_empty(self):
        with pytest.raises(ValueError):
            best_row(ResultTable(columns=['sec_lb']), 'sec_lb')

    def test_unknown_column(self):
        with pytest.raises(KeyError):
            best_row(ResultTable(columns=['sec_lb'], rows=[{'sec_lb': 1.0}]), 'mc_ssr')


class TestEvaluatePoint:
    """Test single sweep points and sweep tables"""

    def test_analytical_only(self):
        row = evaluate_point(Scenario(), analytical=True, simulated=False)
        assert row['sec_lb'] <= row['sum_capacity']
        assert 'mc_ssr' not in row

    def test_mode_selects_ssr(self):
        row_a = evaluate_point(Scenario(n_realizations=2000, mc_mode='a'), analytical=False)
        row_b = evaluate_point(Scenario(n_realizations=2000, mc_mode='b'), analytical=False)
        assert row_a['mc_ssr'] == row_a['mc_mode_a']
        assert row_b['mc_ssr'] == row_b['mc_mode_b']
        assert row_b['mc_mode_b'] >= row_b['mc_mode_a'] - 2 * row_b['mc_mode_b_se']

    def test_deterministic_across_workers(self):
        scenario = parse_scenario('n = 5000\nsweep = a_r, 0.1, 0.3, 0.1\n')
        single = write_csv(sweep_table(scenario, analytical=False, workers=1))
        pooled = write_csv(sweep_table(scenario, analytical=False, workers=3))
        assert single == pooled

    def test_self_interference_lowers_bound(self):
        values = [
            evaluate_point(Scenario(rho_si_db=db), simulated=False)['sec_lb']
            for db in (-30.0, -10.0, 10.0)
        ]
        assert np.all(np.diff(values) <= 0)


@pytest.mark.integration
class TestRunFigure:
    """Test the figure recipes at desk scale"""

    def test_allocation_sweeps(self):
        table = run_figure(2, overrides={'n_realizations': 2000})
        assert len(table.rows) == 48
        assert {row['swept'] for row in table.rows} == {'a_s', 'a_r'}
        for row in table.rows:
            assert row['sec_lb'] <= row['mc_mode_a'] + 2 * row['mc_mode_a_se'] + 0.02
        a_s_rows = [row for row in table.rows if row['swept'] == 'a_s']
        assert all(row['a_r'] == 0.14 for row in a_s_rows)

    def test_interior_maximum(self):
        table = run_figure(2, overrides={'n_realizations': 2000})
        bounds = [row['sec_lb'] for row in table.rows if row['swept'] == 'a_s']
        assert max(bounds[1:-1]) > max(bounds[0], bounds[-1])

    def test_lower_snr_recipe(self):
        table = run_figure(3, overrides={'n_realizations': 2000})
        assert all(row['rho_db'] == 10.0 for row in table.rows)

    def test_eve_distance_converges_to_sum_capacity(self):
        table = run_figure(4, overrides={'n_realizations': 2000})
        assert len(table.rows) == 20
        last = table.rows[-1]
        assert (last['d_se'], last['d_re']) == (200.0, 100.0)
        assert last['sec_lb'] == pytest.approx(last['sum_capacity'], rel=0.02)

    def test_snr_geometries(self):
        table = run_figure(5, overrides={'n_realizations': 2000})
        assert len(table.rows) == 63
        assert [row['geometry'] for row in table.rows[::21]] == ['near', 'mid', 'far']

    def test_far_eve_secrecy_grows_with_snr(self):
        table = run_figure(5, overrides={'n_realizations': 20_000})
        far = [row for row in table.rows if row['geometry'] == 'far']
        assert [row['rho_db'] for row in far] == sweep_values(0.0, 40.0, 2.0)
        for low, high in zip(far, far[1:]):
            slack = 2 * max(low['mc_ssr_se'], high['mc_ssr_se'])
            assert high['mc_ssr'] >= low['mc_ssr'] - slack

    def test_near_eve_secrecy_at_high_snr(self):
        table = run_figure(5, overrides={'n_realizations': 20_000})
        near = {row['rho_db']: row for row in table.rows if row['geometry'] == 'near'}
        # D1 keeps a positive log-ratio of path gains, so high SNR still helps
        assert near[40.0]['mc_mode_a'] > near[10.0]['mc_mode_a'] + 0.1
        far = {row['rho_db']: row for row in table.rows if row['geometry'] == 'far'}
        assert near[40.0]['mc_mode_a'] < far[40.0]['mc_mode_a']

    def test_residual_si_lowers_simulated_secrecy(self):
        table = run_figure(6, overrides={'n_realizations': 20_000})
        assert [row['rho_si_db'] for row in table.rows] == sweep_values(-30.0, 10.0, 2.0)
        for low, high in zip(table.rows, table.rows[1:]):
            slack = 2 * max(low['mc_ssr_se'], high['mc_ssr_se'])
            assert high['mc_ssr'] <= low['mc_ssr'] + slack

    def test_residual_si_column(self):
        table = run_figure(6, overrides={'n_realizations': 2000})
        assert all(row['si_suppression_db'] == row['rho_db'] - row['rho_si_db'] for row in table.rows)
        bounds = [row['sec_lb'] for row in table.rows]
        assert np.all(np.diff(bounds) <= 1e-12)

    def test_optimized_allocation_beats_fixed(self):
        table = run_figure(7, overrides={'n_realizations': 20})
        rows = {row['geometry']: row for row in table.rows}
        assert set(rows) == {'far', 'near'}
        for row in rows.values():
            assert row['ssrot_mean'] >= row['fpapt_mean']
            assert row['gain_mean'] >= 0
        assert rows['near']['ssrot_mean'] > rows['near']['fpapt_mean']

    def test_per_realization_rows(self):
        table = run_figure(7, overrides={'n_realizations': 5}, per_realization=True)
        assert len(table.rows) == 10
        assert all(row['ssrot'] >= row['fpapt'] for row in table.rows)

    def test_unknown_figure(self):
        with pytest.raises(ValueError):
            run_figure(8)

    @pytest.mark.slow
    def test_figure_seven_reproduction(self):
        table = run_figure(7, overrides={'n_realizations': settings.MC_OPTIMIZER_REALIZATIONS})
        for row in table.rows:
            assert row['ssrot_mean'] > row['fpapt_mean']
        near = next(row for row in table.rows if row['geometry'] == 'near')
        assert near['gain_mean'] > 3 * near['gain_se']


class TestCommands:
    """Test the management commands end to end"""

    def test_analyze_writes_csv(self, tmp_path):
        scenario = tmp_path / 'fig2.scn'
        scenario.write_text(FIG2_SCENARIO)
        out = tmp_path / 'fig2.csv'
        call_command('analyze', scenario=scenario, out=out, stderr=StringIO())
        lines = out.read_text().splitlines()
        assert lines[0].startswith('rho_db,rho_si_db,d_se,d_re,a_s,a_r,c_d1')
        assert len(lines) == 25

    def test_simulate_to_stdout(self):
        stdout = StringIO()
        call_command('simulate', n_realizations=1000, seed=3, stdout=stdout)
        header, row = stdout.getvalue().splitlines()
        assert 'mc_mode_b' in header
        assert row.endswith(',3,1000,1.0.0')

    def test_figure_is_reproducible(self, tmp_path):
        for name, workers in (('one.csv', 1), ('two.csv', 2)):
            call_command('figure', 4, n_realizations=1000, seed=9, workers=workers,
                         out=tmp_path / name, stderr=StringIO())
        assert (tmp_path / 'one.csv').read_bytes() == (tmp_path / 'two.csv').read_bytes()

    def test_optimizer_figure_uses_workers(self, tmp_path):
        for name, workers in (('one.csv', 1), ('two.csv', 2)):
            call_command('figure', 7, n_realizations=6, seed=9, workers=workers, per_realization=True,
                         out=tmp_path / name, stderr=StringIO())
        lines = (tmp_path / 'two.csv').read_text().splitlines()
        assert len(lines) == 13
        assert (tmp_path / 'one.csv').read_bytes() == (tmp_path / 'two.csv').read_bytes()

    def test_no_auth_or_database_surface(self):
        assert not any(app.startswith('django.contrib') for app in settings.INSTALLED_APPS)
        assert settings.DATABASES == {}
        call_command('check', stdout=StringIO())

    def test_optimize_per_realization(self):
        stdout = StringIO()
        call_command('optimize', n_realizations=3, per_realization=True, stdout=stdout)
        assert len(stdout.getvalue().splitlines()) == 4

    def test_configuration_error_exit_code(self, tmp_path):
        scenario = tmp_path / 'bad.scn'
        scenario.write_text('a_s = 0.7\n')
        with pytest.raises(CommandError) as excinfo:
            call_command('analyze', scenario=scenario)
        assert excinfo.value.returncode == 1
        assert 'line 1' in str(excinfo.value)

    @pytest.mark.slow
    def test_selftest(self):
        stdout = StringIO()
        call_command('selftest', stdout=stdout)
        assert 'All 7 self-checks passed' in stdout.getvalue()
