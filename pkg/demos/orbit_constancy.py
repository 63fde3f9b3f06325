"""Dimension of pi g nu as g runs over the rotation group.

For almost every g in the closed group generated by the rotation parts the
projection dim pi g nu takes one value, and it is never smaller. Here the
group is a two-torus in SO(4). We sample 20 group elements by random
words and compare the spread of the estimates with their fit errors.
"""

from ssproj.experiments import torus_r4_ifs
from ssproj.grassmann import torus_plane
from ssproj.plotting import emit_plot
from ssproj.skewprod import orbit_constancy_experiment

ifs = torus_r4_ifs()
plane = torus_plane([1.0, 0.0, 1.0, 0.0], 1.0)
rep = orbit_constancy_experiment(ifs, plane, g_samples=20, cloud_size=50_000, seed=0)

print(f"mean {rep['mean']:.3f}, spread {rep['spread']:.4f}, min {rep['min']:.3f}")
print(f"pooled fit stderr {rep['pooled_stderr']:.4f}")
print("spread flag:", rep["spread_flag"], " min flag:", rep["min_flag"])

with open("orbit_hist.svg", "w") as fh:
    fh.write(emit_plot({"scenario": "orbit demo", "seeds": {"sample": 0, "estimator": 0}, "orbit": rep}, "orbit_hist"))
print("wrote orbit_hist.svg")
