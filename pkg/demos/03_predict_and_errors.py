"""Roll identified models forward and score them against the simulator."""
from queuedmd import experiment, predict, simqueue

trace = simqueue.simulate(simqueue.default_config())
series, controls = trace.queues, trace.controls
m = 400

for method, h in (("dmdc", 1), ("hdmdc", 9)):
    model = experiment.identify(series, controls, method, m, h)
    for steps in (200, 400, 1200):
        res = experiment.forecast(model, series, controls, m, steps)
        actual = series.values[:, m + 1:m + 1 + steps]
        es = predict.error_series(actual, res)
        print(f"{method:5s} h={h} steps={steps:4d}  rmse={es.aggregate_rmse:.3f}  mae={es.aggregate_mae:.3f}")

# a rollout can be continued from its own final history
model = experiment.identify(series, controls, "hdmdc", m, 9)
first = experiment.forecast(model, series, controls, m, 100)
u = controls.values[:, m + 101 - 9 + 1:m + 101 + 100]
second = predict.rollout(model, first.history(), u, 100, start_index=m + 101)
print("continued rollout covers columns", second.start_index, "to", second.start_index + second.steps - 1)
