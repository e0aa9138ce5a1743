"""
Reproduce one of the figure tables (2-7) as CSV
"""
from apps.experiments.management.base import ExperimentCommand
from apps.experiments.services import FIGURES, run_figure


class Command(ExperimentCommand):
    help = 'Run a canned figure recipe: 2/3 allocation sweeps, 4 Eve distance, 5 SNR, 6 residual SI, 7 SSROT vs FPAPT'

    def add_arguments(self, parser):
        parser.add_argument('figure_id', type=int, choices=FIGURES)
        super().add_arguments(parser)
        parser.add_argument('--per-realization', action='store_true', help='Figure 7: one row per realization')

    def run(self, **options):
        values, _ = self.overrides(options)
        table = run_figure(
            options['figure_id'],
            overrides=values,
            workers=options.get('workers'),
            per_realization=options['per_realization'],
        )
        self.emit(table, options)
