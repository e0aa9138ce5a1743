"""
Per-realization power allocation (SSROT) against the fixed allocation (FPAPT)
"""
from django.conf import settings

from apps.experiments.management.base import ExperimentCommand
from apps.experiments.services import comparison_table


class Command(ExperimentCommand):
    help = 'Optimize (a_s, a_r) per channel realization and compare with FPAPT'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--per-realization', action='store_true', help='One row per realization')

    def run(self, **options):
        values, lines = self.overrides(options)
        values.setdefault('n_realizations', settings.MC_OPTIMIZER_REALIZATIONS)
        scenario = self.validate(values, lines)
        geometry = [('scenario', (scenario.d_se, scenario.d_re))]
        table = comparison_table(scenario, geometry, options['per_realization'], options.get('workers'))
        self.emit(table, options)
