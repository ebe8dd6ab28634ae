"""Path-loss curves, link budgets, and a coverage map.

Plots the log-distance model for both geographies, tabulates the maximum
device-to-device range per radio tech, and renders which tiles of a random
world can reach a 3G base station.  Figures land in demos/out/.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chaincourier.connectivity import coverage
from chaincourier.propagation import PropagationEnv, default_radios, path_loss_db
from chaincourier.worldgen import MapParams, TileKind, generate_world

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

env = PropagationEnv()
radios = default_radios()

# path loss vs distance for both geographies
distances = np.linspace(10, 1000, 200)
fig, ax = plt.subplots(figsize=(7, 4))
for geography in ("urban", "rural"):
    losses = [path_loss_db(env, geography, float(d)) for d in distances]
    ax.plot(distances, losses, label=f"{geography} (n={env.exponent[geography]})")
ax.set_xlabel("distance between tile centers [m]")
ax.set_ylabel("path loss [dB]")
ax.set_title("Log-distance path loss, reference 40 dB at 10 m")
ax.grid(True, alpha=0.3)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "path_loss.png"), dpi=120)
print(f"wrote {OUT}/path_loss.png")

# maximum clear-air device-to-device range per direct tech
print("\nlink budgets (urban, no obstacles):")
for tech_id in ("bluetooth", "wifi"):
    tech = radios[tech_id]
    budget = tech.tx_power_dbm - tech.sensitivity_dbm
    # solve PL0 + 10 n log10(d/10) = budget
    n = env.exponent["urban"]
    max_d = 10 * 10 ** ((budget - tech.ref_loss_db) / (10 * n))
    print(f"  {tech_id:9s} tx {tech.tx_power_dbm:5.1f} dBm, sens {tech.sensitivity_dbm:6.1f} dBm"
          f" -> usable out to ~{max_d:5.0f} m ({max_d/10:.0f} tiles)")

# obstacles eat into the budget
wifi = radios["wifi"]
for obstacles in ([], ["building"], ["building", "building"], ["building", "car"]):
    loss = path_loss_db(env, "urban", 200.0, obstacles)
    margin = wifi.tx_power_dbm - loss - wifi.sensitivity_dbm
    label = "+".join(obstacles) if obstacles else "clear"
    print(f"  wifi at 200 m through {label:20s}: margin {margin:6.1f} dB"
          f" ({'up' if margin >= 0 else 'down'})")

# coverage map of a generated world; a full-power 43 dBm macro cell would
# blanket a 480 m map, so down-tune the stations to picocell power to make
# the coverage holes the game is about actually visible
from chaincourier.propagation import RadioTech

pico_3g = RadioTech("3g", "infrastructure", tx_power_dbm=-5.0, sensitivity_dbm=-75.0)
params = MapParams(width=48, height=32, geography="urban", road_density=0.2,
                   obstacle_density=0.15, stations=(("3g", 3),))
world = generate_world(11, params, station_power={"3g": pico_3g.tx_power_dbm})
covered = np.zeros((world.height, world.width))
for y in range(world.height):
    for x in range(world.width):
        covered[y, x] = coverage(world, env, pico_3g, (x, y))

fig, ax = plt.subplots(figsize=(8, 5))
ax.imshow(covered, cmap="YlGn", alpha=0.7, interpolation="nearest")
obstacle_mask = np.isin(world.tiles, (TileKind.BUILDING, TileKind.CAR))
ax.imshow(np.where(obstacle_mask, 1.0, np.nan), cmap="gray_r", alpha=0.8,
          interpolation="nearest")
for s in world.stations:
    ax.plot(s.pos[0], s.pos[1], "r^", markersize=10)
ax.set_title("3G coverage (green), obstacles (gray), stations (red)")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "coverage.png"), dpi=120)
pct = covered.mean()
print(f"\nwrote {OUT}/coverage.png; {pct:.0%} of tiles covered, "
      f"{1 - pct:.0%} left as coverage holes")
