# bath_modes/management/commands/_base.py
import numpy as np
from django.core.management.base import BaseCommand, CommandError

from bath_modes.exceptions import BathModesError, ConfigError
from bath_modes.run_config import load_config
from bath_modes.serializers import RunConfigSerializer

CONFIG_EXIT_CODE = 2
NUMERICAL_EXIT_CODE = 3


class BathModesCommand(BaseCommand):
    """
    Shared flag handling: ``--config FILE`` plus one ``--some-key`` flag per
    RunConfig key. Flags override the file.
    """

    def add_arguments(self, parser):
        parser.add_argument('--config', help="key = value run configuration file")
        for name, field in RunConfigSerializer().fields.items():
            parser.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None,
                                help=field.help_text or f"RunConfig key {name}")

    def load(self, options):
        overrides = {name: options.get(name) for name in RunConfigSerializer().fields}
        return load_config(options.get('config'), overrides)

    def handle(self, *args, **options):
        try:
            self.run(options)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=CONFIG_EXIT_CODE)
        except (BathModesError, np.linalg.LinAlgError) as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=NUMERICAL_EXIT_CODE)

    def run(self, options):
        raise NotImplementedError
