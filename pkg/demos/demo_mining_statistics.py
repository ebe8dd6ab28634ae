"""Proof-of-work attempt statistics across difficulties.

Mining tries nonces until the SHA-256 header hash drops below the target
2^(256-k), so attempts are geometric with mean 2^k.  This script mines a
batch of jobs per difficulty and compares sample means against the theory,
then histograms the k=8 distribution.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chaincourier import blockchain as bc
from chaincourier.blockchain import Role

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)


def mine_once(block_id: int, difficulty: int) -> int:
    target = bc.target_for_difficulty(difficulty)
    block = bc.Block(
        id=block_id, creator=block_id % 4, created_tick=block_id,
        prev_hash=bc.GENESIS_HASH,
        payload_digest=bc.payload_digest(block_id, block_id % 4, block_id),
    )
    job = bc.start_mining(block, miner=0, miner_role=Role.FULL)
    while True:
        outcome = bc.mine_step(job, 8192, target)
        if isinstance(outcome, bc.Found):
            return outcome.attempts
        job = outcome.job


print(f"{'k bits':>7} {'jobs':>6} {'mean':>9} {'expected':>9} {'ratio':>6}")
for k, jobs in ((2, 2000), (4, 2000), (6, 1000), (8, 1000), (10, 400)):
    attempts = [mine_once(i + k * 100_000, k) for i in range(jobs)]
    mean = float(np.mean(attempts))
    print(f"{k:>7} {jobs:>6} {mean:>9.1f} {2**k:>9} {mean / 2**k:>6.3f}")

samples = np.array([mine_once(i, 8) for i in range(1500)])
fig, ax = plt.subplots(figsize=(7, 4))
ax.hist(samples, bins=60, density=True, alpha=0.7, label="measured")
xs = np.arange(1, samples.max())
p = 1 / 256
ax.plot(xs, p * (1 - p) ** (xs - 1), "r-", lw=2, label="geometric, mean 256")
ax.set_xlabel("attempts to find a winning nonce")
ax.set_ylabel("probability density")
ax.set_title("Proof-of-work attempts at difficulty 8 bits")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "pow_attempts.png"), dpi=120)
print(f"\nwrote {OUT}/pow_attempts.png (sample mean {samples.mean():.1f})")
