"""GEH and correlation checks between two simulated runs."""
from queuedmd import metrics, simqueue

base = simqueue.simulate(simqueue.default_config(seed=17))
other = simqueue.simulate(simqueue.default_config(seed=18))

ref = simqueue.movement_volumes(base).sum(axis=1)
sim = simqueue.movement_volumes(other).sum(axis=1)
rep = simqueue.calibration_check(sim, ref)
for name, r, s, g in zip(simqueue.MOVEMENTS, ref, sim, rep.geh):
    print(f"{name:4s} ref={r:6.0f} sim={s:6.0f} GEH={g:5.2f}")
print(f"CC = {rep.cc:.4f} (threshold {metrics.CC_THRESHOLD}), all pass: {rep.passed}")

print("single-pair GEH(100, 130) =", round(metrics.geh(100, 130), 3))
