"""How much does routing strategy matter?

The same scenario plays out with three different bot line-ups across a few
seeds.  Random walkers rarely meet a miner in coverage; couriers chase the
nearest full node, and coverage-seeking miners sit where links are good.
Compare validated blocks per minute and leftover energy.
"""

import io
import statistics

from chaincourier.scenario import load_scenario
from chaincourier.session import Session
from chaincourier.sim import score

import json
import os

HERE = os.path.dirname(__file__)
with open(os.path.join(HERE, "..", "scenarios", "tiny.json"), encoding="utf-8") as fh:
    BASE = json.load(fh)

LINEUPS = {
    "random walkers": ["random"] * 4,
    "couriers + miners": ["courier", "courier", "miner", "miner"],
    "all greedy coverage": ["greedy"] * 4,
}

TICKS = 3_000  # a five-minute round


def play(bots, seed):
    doc = dict(BASE)
    doc["seed"] = seed
    scenario = load_scenario(json.dumps(doc))
    session = Session(scenario, max_ticks=TICKS, out=io.StringIO(), bots=bots)
    state = session.run()
    report = score(state)
    energy = statistics.mean(r.energy_remaining_mu / 1000 for r in report.per_node)
    return report.validated_per_minute, energy, len(state.chain)


print(f"{'lineup':>22} {'seed':>5} {'chain':>6} {'valid/min':>10} {'avg energy':>11}")
for name, bots in LINEUPS.items():
    rates = []
    for seed in (7, 8, 9):
        vpm, energy, chain = play(bots, seed)
        rates.append(vpm)
        print(f"{name:>22} {seed:>5} {chain:>6} {vpm:>10.2f} {energy:>11.0f}")
    print(f"{'':>22} {'mean':>5} {'':>6} {statistics.mean(rates):>10.2f}")
    print()
