# bath_modes/management/commands/discretize.py
from bath_modes import runners

from ._base import BathModesCommand


class Command(BathModesCommand):
    help = "Discretize a bath spectral density into modes with one method (id, ld, mdm or bsdo)"

    def run(self, options):
        cfg = self.load(options)
        bath = runners.run_discretize(cfg)
        self.stdout.write(self.style.SUCCESS(
            f"✅ {bath.method}: {len(bath)} modes written to {runners.output_dir(cfg)}"))
        residual = bath.provenance.get('achieved_residual')
        if residual is not None:
            self.stdout.write(f"achieved BCF residual {residual:.3e}")
        if bath.provenance.get('tolerance_reached') is False:
            self.stderr.write(self.style.WARNING("ID tolerance not reached within id_max_rank"))
        if bath.provenance.get('rank_truncated'):
            self.stderr.write(self.style.WARNING(
                f"ID rank cut back to the numerical rank {bath.provenance['selected_rank']}"))
