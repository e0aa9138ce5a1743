"""
Shared options and error handling for the experiment commands
"""
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.numerics.exceptions import NumericalDomainError, QuadratureError
from apps.system_model.exceptions import InvalidConfigurationError

from ..exceptions import ScenarioParseError
from ..services import Scenario, parse_overrides, validate_scenario, write_csv

CONFIGURATION_ERRORS = (InvalidConfigurationError, ScenarioParseError)
NUMERICAL_ERRORS = (QuadratureError, NumericalDomainError)


class ExperimentCommand(BaseCommand):
    """Base for commands that read a scenario and write a CSV table"""

    def add_arguments(self, parser):
        parser.add_argument('--scenario', type=Path, help='Scenario file of "key = value" lines')
        parser.add_argument('--seed', type=int, help='Random stream key')
        parser.add_argument('--n', type=int, dest='n_realizations', help='Channel realizations')
        parser.add_argument('--out', type=Path, help='CSV output path (default: stdout)')
        parser.add_argument('--mode', choices=['a', 'b'], dest='mc_mode', help='Monte Carlo secrecy mode')
        parser.add_argument('--workers', type=int, help='Monte Carlo threads')

    def overrides(self, options):
        """Scenario-file values, then command-line flags on top; also returns file line numbers"""
        values, lines = {}, {}
        if options.get('scenario'):
            try:
                text = options['scenario'].read_text()
            except OSError as exc:
                raise CommandError(f'cannot read scenario: {exc}', returncode=1) from exc
            values, lines = parse_overrides(text)
        for name in ('seed', 'n_realizations', 'mc_mode'):
            if options.get(name) is not None:
                values[name] = options[name]
                lines.pop(name, None)
        return values, lines

    def validate(self, values, lines) -> Scenario:
        return validate_scenario(Scenario(**values), lines)

    def load_scenario(self, options) -> Scenario:
        return self.validate(*self.overrides(options))

    def emit(self, table, options):
        if options.get('out'):
            write_csv(table, options['out'])
            self.stderr.write(self.style.SUCCESS(f'Wrote {len(table.rows)} rows to {options["out"]}'))
        else:
            self.stdout.write(write_csv(table), ending='')

    def handle(self, *args, **options):
        try:
            self.run(**options)
        except CONFIGURATION_ERRORS as exc:
            raise CommandError(f'configuration error: {exc}', returncode=1) from exc
        except NUMERICAL_ERRORS as exc:
            raise CommandError(f'numerical failure: {exc}', returncode=2) from exc

    def run(self, **options):
        raise NotImplementedError
