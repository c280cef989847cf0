# bath_modes/management/commands/chain.py
from bath_modes import runners

from ._base import BathModesCommand


class Command(BathModesCommand):
    help = "Chain-map the bath on the first bsdo interval"

    def run(self, options):
        cfg = self.load(options)
        chain = runners.run_chain(cfg)
        self.stdout.write(self.style.SUCCESS(
            f"✅ {chain.size}-site chain, system coupling {chain.system_coupling:.6g} cm^-1"))
