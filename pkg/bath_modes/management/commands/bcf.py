# bath_modes/management/commands/bcf.py
from bath_modes import runners

from ._base import BathModesCommand


class Command(BathModesCommand):
    help = "Write the reference bath correlation function, or the BCF of a stored modes CSV"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--modes', help="modes CSV to reconstruct C(t) from")

    def run(self, options):
        cfg = self.load(options)
        series = runners.run_bcf(cfg, options.get('modes'))
        self.stdout.write(self.style.SUCCESS(
            f"✅ C(t) on {series.times.size} points, |C(0)| = {series.normalization:.6g} cm^-2"))
