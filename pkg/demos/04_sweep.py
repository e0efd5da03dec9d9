"""Grid over training size, embedding depth and prediction window."""
from queuedmd import experiment, simqueue

trace = simqueue.simulate(simqueue.default_config())
grid = experiment.SweepGrid(train_snapshots=(200, 400, 800), embedding=(1, 5, 9),
                            window=(200, 400, 800))
rows = experiment.run_sweep(grid, trace.queues, trace.controls, workers=2)
print(experiment.sweep_csv(rows))
