"""One complete bot round, end to end.

Runs the bundled 64x64 scenario with four couriers and four miners, writes
the replay log, re-verifies it bit for bit, and prints the scoreboard and
throughput numbers the metrics exporter derives from the log alone.
"""

import io
import os
import time

from chaincourier.metrics import export_metrics, format_energy
from chaincourier.replay import replay_verify
from chaincourier.scenario import load_scenario
from chaincourier.session import Session
from chaincourier.sim import score

HERE = os.path.dirname(__file__)
OUT = os.path.join(HERE, "out")
os.makedirs(OUT, exist_ok=True)

with open(os.path.join(HERE, "..", "scenarios", "desk64.json"), encoding="utf-8") as fh:
    scenario = load_scenario(fh.read())

replay_path = os.path.join(OUT, "round.ndjson")
started = time.time()
with open(replay_path, "w", encoding="utf-8") as out:
    session = Session(scenario, max_ticks=10_000, out=out,
                      bots=["courier"] * 4 + ["miner"] * 4)
    state = session.run()
elapsed = time.time() - started

print(f"round of {state.tick} ticks finished in {elapsed:.1f}s "
      f"({state.tick / elapsed:,.0f} ticks/s)")
print(f"chain length {len(state.chain)}, {len(state.pending)} blocks still pending")

report = score(state)
print("\nscoreboard:")
print(f"{'node':>4} {'character':>10} {'role':>5} {'created':>8} {'mined':>6} "
      f"{'points':>7} {'energy':>10}")
for row in sorted(report.per_node, key=lambda r: -r.points):
    print(f"{row.node_id:>4} {row.character:>10} {row.role:>5} "
          f"{row.blocks_created_validated:>8} {row.blocks_mined:>6} {row.points:>7} "
          f"{format_energy(row.energy_remaining_mu):>10}")
print(f"\nvalidated per minute: {report.validated_per_minute:.2f}")
if report.mean_time_to_validation_ticks is not None:
    print(f"mean time to validation: {report.mean_time_to_validation_ticks:.0f} ticks "
          f"({report.mean_time_to_validation_ticks / 10:.1f} s)")

with open(replay_path, encoding="utf-8") as fh:
    result = replay_verify(fh)
print(f"\nreplay {replay_path}: {'verified bit-for-bit' if result.ok else result.message}")

with open(replay_path, encoding="utf-8") as fh:
    metrics = export_metrics(fh)
print("chain growth every 1000 ticks:",
      [p.chain_length for p in metrics.series if p.tick % 1000 == 0])
