"""Integrate the doubled damped oscillator in all three regimes and compare with the closed form."""

import numpy as np

from ncmech import models as mdl
from ncmech.integrate import integrate_adaptive
from ncmech.lagrangian import DoubledState

entry = mdl.get_model("damped_oscillator")
s0 = DoubledState.from_lightcone(0.0, [1.0], [0.0], [0.0], [0.0])

for c in (0.5, 2.0, 3.0):
    params = {"m": 1.0, "w": 1.0, "c": c}
    spec = entry.spec(params)
    traj = integrate_adaptive(spec, s0, 20.0, 1e-10, 1e-12, 0.05)
    exact, _ = mdl.closed_form_series(entry, spec.params, s0, traj.times)
    dev = np.max(np.abs(traj.Y - exact))
    print(f"c={c:<4} regime={mdl.oscillator_regime(spec.params):9s} q+(20)={traj.qplus[-1, 0]: .6e}  "
          f"max deviation {dev:.2e}")
