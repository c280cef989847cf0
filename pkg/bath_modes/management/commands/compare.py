# bath_modes/management/commands/compare.py
from bath_modes import runners

from ._base import BathModesCommand


class Command(BathModesCommand):
    help = "Compare every configured method against the reference BCF and write plot-ready tables"

    def run(self, options):
        cfg = self.load(options)
        bundle = runners.run_compare(cfg)
        for label, result in bundle.results.items():
            self.stdout.write(f"{label:>18}  modes={len(result.bath):4d}  "
                              f"max={result.error.max_error:.3e}  mean={result.error.mean_error:.3e}")
        for label, message in bundle.failures.items():
            self.stderr.write(self.style.ERROR(f"❌ {label}: {message}"))
        self.stdout.write(self.style.SUCCESS(f"✅ tables written to {runners.output_dir(cfg)}"))
