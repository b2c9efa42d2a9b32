"""Show the exponential growth of the minus sector for a free particle with linear drag."""

import numpy as np

from ncmech import models as mdl
from ncmech.integrate import growth_rate_fit, integrate_adaptive, window
from ncmech.lagrangian import DoubledState

for c in (1.0, 2.0, 4.0):
    spec = mdl.get_model("free_particle").spec({"m": 1.0, "c": c})
    s0 = DoubledState.from_lightcone(0.0, [0.0], [1.0], [0.0], [1e-6])
    traj = integrate_adaptive(spec, s0, 5.0 / c, 1e-10, 1e-12, 0.005)
    t, x = window(traj.times, np.abs(traj.vminus[:, 0]), 1.0 / c, 5.0 / c)
    fit = growth_rate_fit(t, x)
    # q+ settles at q+(0) + m v+(0)/c while |v-| grows like exp(c t/m)
    print(f"c={c}: fitted |v-| rate {fit.rate:.6f} (expected {c:.1f}), q+ at end {traj.qplus[-1, 0]:.6f}")
