"""
Monte Carlo ergodic rates over a scenario sweep
"""
from apps.experiments.management.base import ExperimentCommand
from apps.experiments.services import sweep_table


class Command(ExperimentCommand):
    help = 'Estimate ergodic rates and secrecy sum rates by Monte Carlo'

    def run(self, **options):
        scenario = self.load_scenario(options)
        table = sweep_table(scenario, analytical=False, simulated=True, workers=options.get('workers'))
        self.emit(table, options)
