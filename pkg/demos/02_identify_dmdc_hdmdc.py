"""Identify DMDc and Hankel DMDc models from simulated queues.

The Hankel model acts on ``h`` stacked states, so its ``A`` is
``h*n x h*n``. ``extract_current_block`` pulls out the rows that map to
the newest state.
"""
import numpy as np

from queuedmd import simqueue, sysid
from queuedmd.predict import spectral_stability
from queuedmd.snapshots import build_snapshot_pair

trace = simqueue.simulate(simqueue.default_config())
series, controls = trace.queues, trace.controls
m = 400

pair = build_snapshot_pair(series, 0, m)
dmdc = sysid.dmdc(pair, controls.values[:, :m], "auto")
print(f"DMDc: A {dmdc.a.shape}, B {dmdc.b.shape}, rank {dmdc.rank_used}")

hd = sysid.hdmdc(series, controls, h=9, train_window=m, rank_spec="auto")
print(f"HDMDc: A {hd.a.shape}, B {hd.b.shape}, rank {hd.rank_used}")

a_cur, b_cur = sysid.extract_current_block(hd)
print(f"current-state block: A {a_cur.shape}, B {b_cur.shape}")

for name, model in (("DMDc", dmdc), ("HDMDc", hd)):
    rep = spectral_stability(model)
    print(f"{name}: spectral radius {rep.spectral_radius:.4f}, stable={rep.stable}")

# plain DMD on the same window, for comparison of the uncontrolled spectrum
free = sysid.dmd(pair, "auto")
print("largest DMD eigenvalue magnitudes:", np.round(np.abs(free.eigenvalues[:4]), 4))
