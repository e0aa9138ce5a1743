"""
Analytical ergodic rates and the secrecy lower bound over a scenario sweep
"""
import logging

from apps.experiments.management.base import ExperimentCommand
from apps.experiments.services import best_row, sweep_table

logger = logging.getLogger(__name__)


class Command(ExperimentCommand):
    help = 'Evaluate the closed-form and quadrature ergodic rates for a scenario'

    def run(self, **options):
        scenario = self.load_scenario(options)
        table = sweep_table(scenario, analytical=True, simulated=False)
        best = best_row(table, 'sec_lb')
        logger.info('best sec_lb %.6f at a_s=%s a_r=%s', best['sec_lb'], best['a_s'], best['a_r'])
        self.emit(table, options)
