"""Acceptance criteria, one test each, each printing a PASS/FAIL line."""

import math

import numpy as np
import pytest

from ncmech import charges as ch
from ncmech import expr as ex
from ncmech import models as mdl
from ncmech import scenario as sc
from ncmech.hamiltonian import PhaseState, lightcone_observable, momenta, poisson_bracket
from ncmech.integrate import (
    envelope_rate_fit,
    growth_rate_fit,
    integrate_adaptive,
    integrate_rk4,
    window,
)
from ncmech.lagrangian import DoubledState


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})")
        assert ok, detail

    return emit


def oscillator_exact(c, t):
    # m = w = 1, q+(0) = 1, v+(0) = 0
    g = c / 2
    if g < 1:
        W = math.sqrt(1 - g * g)
        return np.exp(-g * t) * (np.cos(W * t) + g / W * np.sin(W * t))
    if g == 1:
        return (1 + t) * np.exp(-t)
    k = math.sqrt(g * g - 1)
    return np.exp(-g * t) * (np.cosh(k * t) + g / k * np.sinh(k * t))


def oscillator_run(c, qm0=0.0, vm0=0.0):
    spec = mdl.get_model("damped_oscillator").spec({"m": 1.0, "w": 1.0, "c": c})
    s0 = DoubledState.from_lightcone(0.0, [1.0], [0.0], [qm0], [vm0])
    return spec, integrate_adaptive(spec, s0, 20.0, 1e-10, 1e-12, 0.01)


def test_criterion_01_oscillator_closed_forms(report):
    devs = {}
    for c in (0.5, 2.0, 3.0):
        _, traj = oscillator_run(c)
        devs[c] = float(np.max(np.abs(traj.qplus[:, 0] - oscillator_exact(c, traj.times))))
    ok = all(d <= 1e-8 for d in devs.values())
    report(1, "damped oscillator closed forms, three branches", ok,
           ", ".join(f"c={c}: {d:.2e}" for c, d in devs.items()))


def test_criterion_02_conserved_generators(report):
    worst = {}
    runs = [(c, 0.0, 0.0) for c in (0.5, 2.0, 3.0)] + [(0.5, 0.01, -0.02)]
    for c, qm0, vm0 in runs:
        spec, traj = oscillator_run(c, qm0, vm0)
        obs = ch.builtin_charges("oscillator", spec)
        phs = [momenta(spec, s) for s in traj.states]
        for key in ("H", "Jtilde"):
            vals = np.array([obs[key].value(ph) for ph in phs])
            worst[(c, qm0, key)] = float(np.max(np.abs(vals - vals[0])))
    ok = all(v <= 1e-6 for v in worst.values())
    report(2, "H and Jtilde conserved", ok, f"max drift {max(worst.values()):.2e}")


def test_criterion_03_violated_charges(report):
    lines = []
    ok = True
    for name in sc.bundled_scenarios():
        res = sc.run_scenario(sc.load_config(sc.bundled_path(name)))
        mr = res.ledger.max_residuals
        e = max(mr["E1"], mr["E2"])
        fkk = res.ledger.fkk_max
        ok &= e <= 1e-6 and fkk <= 1e-8
        lines.append(f"{name}: E {e:.1e} fkk {fkk:.1e}")
    report(3, "sector energy rate equations on all bundled scenarios", ok, "; ".join(lines))


def test_criterion_04_h_equals_e1_minus_e2(report):
    rng = np.random.default_rng(4)
    states = [DoubledState(0.0, *rng.uniform(-1, 1, size=(4, 1))) for _ in range(100)]
    worst = 0.0
    ok = True
    for name in ("free_particle", "free_particle_circle", "free_fall", "damped_oscillator"):
        rep = ch.check_H_equals_E1_minus_E2(mdl.get_model(name).spec(), states)
        ok &= rep.identity_checked and rep.passed
        worst = max(worst, rep.max_residual)
    quad = ch.check_H_equals_E1_minus_E2(mdl.get_model("polynomial_drag").spec(), states)
    ok &= worst <= 1e-10 and not quad.homogeneous and not quad.identity_checked
    report(4, "H = E1 - E2 for linear drag; refused for quadratic drag", ok,
           f"max residual {worst:.1e}, quadratic homogeneity residual {quad.max_scaling_residual:.2f}")


def test_criterion_05_bracket_algebra(report):
    spec = mdl.get_model("damped_oscillator").spec()
    rng = np.random.default_rng(5)
    qp, qm = lightcone_observable("qplus"), lightcone_observable("qminus")
    pp, pm = lightcone_observable("pplus"), lightcone_observable("pminus")
    canon = 0.0
    for _ in range(100):
        ph = PhaseState(0.0, *rng.uniform(-2, 2, size=(4, 1)))
        canon = max(canon,
                    abs(poisson_bracket(spec, "q1[0]", "p1[0]", ph) - 1),
                    abs(poisson_bracket(spec, "q2[0]", "p2[0]", ph) + 1),
                    abs(poisson_bracket(spec, qp, pm, ph) - 0.5),
                    abs(poisson_bracket(spec, qm, pp, ph) - 0.5))
    alg = ch.verify_oscillator_algebra(points=100, tol=1e-9)
    keys = ["{H,Jtilde}=0", "{Jtilde,E+}=2E+", "{Jtilde,E-}=-2E-", "{Jtilde,E0+}=2E0-",
            "{Jtilde,E0-}=2E0+", "{E0+,E0-}=W/2 Jtilde"]
    worst = max(alg.residuals[k] for k in keys)
    ok = canon <= 1e-12 and worst <= 1e-9
    report(5, "canonical brackets and SO(1,2) relations", ok,
           f"canonical {canon:.1e}, algebra {worst:.1e}, omega_+^2 = {alg.omega_plus_sq:.6g}")


def test_criterion_06_unphysical_growth(report):
    rates = {}
    for c in (1.0, 2.0, 4.0):
        spec = mdl.get_model("free_particle").spec({"m": 1.0, "c": c})
        s0 = DoubledState.from_lightcone(0.0, [0.0], [1.0], [0.0], [1e-6])
        traj = integrate_adaptive(spec, s0, 5.0 / c, 1e-10, 1e-12, 0.005)
        t, x = window(traj.times, np.abs(traj.vminus[:, 0]), 1.0 / c, 5.0 / c)
        rates[c] = growth_rate_fit(t, x).rate
    c = 1.0
    spec = mdl.get_model("damped_oscillator").spec({"m": 1.0, "w": 1.0, "c": c})
    traj = integrate_adaptive(spec, DoubledState.from_lightcone(0.0, [0.0], [0.0], [1e-3], [0.0]),
                              25.0, 1e-10, 1e-14, 0.01)
    env = envelope_rate_fit(traj.times, traj.qminus[:, 0]).rate
    ok = all(abs(r - c) <= 0.01 * c for c, r in rates.items()) and abs(env - 0.5) <= 0.005
    report(6, "unphysical sector growth rates", ok,
           ", ".join(f"c={c}: {r:.4f}" for c, r in rates.items()) + f", oscillator envelope {env:.4f}")


def test_criterion_07_trivial_solution(report):
    worst = {}
    for name, entry in mdl.catalog().items():
        s0 = mdl.initial_state(entry, {"physical": True}, entry.n)
        traj = integrate_adaptive(entry.spec(), s0, 20.0, 1e-10, 1e-12, 0.05)
        worst[name] = float(np.max(np.abs(traj.qminus)))
    ok = all(v <= 1e-10 for v in worst.values())
    report(7, "trivial solution stays trivial on every catalog model", ok, f"max |q-| {max(worst.values()):.1e}")


def test_criterion_08_quadratic_drag(report):
    spec = mdl.get_model("polynomial_drag").spec({"m": 1.0, "c1": 1.0, "c2": 1.0})
    traj = integrate_adaptive(spec, DoubledState.from_lightcone(0.0, [0.0], [1.0], [0.0], [0.0]),
                              2.0, 1e-12, 1e-14, 0.5)
    dev = abs(traj.qplus[-1, 0] - 2 * math.log(2 - math.exp(-1)))
    rates = {}
    for label, vm0 in (("bounded", 0.5 * 1.0 * 0.1), ("generic", 0.0)):
        tr = integrate_adaptive(spec, DoubledState.from_lightcone(0.0, [0.0], [1.0], [0.1], [vm0]),
                                30.0, 1e-10, 1e-12, 0.01)
        t, x = window(tr.times, np.abs(tr.qminus[:, 0]), 10.0, 30.0)
        rates[label] = growth_rate_fit(t, x).rate
    ok = dev <= 1e-8 and abs(rates["bounded"]) <= 1e-3 and abs(rates["generic"] - 0.5) <= 0.02 * 0.5
    report(8, "quadratic drag value and q- branches", ok,
           f"q+(2) deviation {dev:.1e}, bounded rate {rates['bounded']:.1e}, generic rate {rates['generic']:.4f}")


def test_criterion_09_central_force(report):
    entry = mdl.get_model("central_force")
    spec = entry.spec()
    s0 = mdl.initial_state(entry, {"qp": [1.0, 0.0, 0.0], "vp": [0.0, 1.0, 0.2], "physical": True}, 3)
    traj = integrate_adaptive(spec, s0, 20.0, 1e-10, 1e-12, 0.05)
    # rotate so the initial orbital plane is z = 0
    n = np.cross(traj.qplus[0], traj.vplus[0])
    n /= np.linalg.norm(n)
    out_of_plane = float(np.max(np.abs(traj.qplus @ n)))
    J = np.linalg.norm(np.cross(traj.qplus, traj.vplus), axis=1) * spec.params["mu"]
    rate = -growth_rate_fit(traj.times, J).rate
    want = mdl.angular_momentum_decay_rate(spec.params)
    flag = next(d for d in mdl.published_discrepancies() if d.key == "angular_momentum_decay")
    ok = out_of_plane <= 1e-10 and abs(rate - want) <= 0.01 * want and not flag.agrees
    report(9, "central force plane and angular momentum decay", ok,
           f"out of plane {out_of_plane:.1e}, rate {rate:.5g} vs {want:.5g}, published value flagged")


def test_criterion_10_numerics_hygiene(report, tmp_path):
    rng = np.random.default_rng(10)
    h = 1e-6
    worst = 0.0
    specs = [e.spec() for e in mdl.catalog().values()]
    for k in range(1000):
        spec = specs[k % len(specs)]
        env = dict(spec.params)
        env["t"] = float(rng.uniform(0, 1))
        for name in spec.seeds[:-1]:
            env[name] = float(rng.uniform(-1, 1)) + (1.5 if spec.n >= 3 and name.startswith("q") else 0.0)
        jet = ex.evaluate_jet(spec.lam, env, spec.seeds)
        i = int(rng.integers(len(spec.seeds)))
        up, dn = dict(env), dict(env)
        up[spec.seeds[i]] += h
        dn[spec.seeds[i]] -= h
        fd = (ex.evaluate(spec.lam, up) - ex.evaluate(spec.lam, dn)) / (2 * h)
        worst = max(worst, abs(jet.grad[i] - fd) / (1 + abs(jet.grad[i])))

    spec = mdl.get_model("damped_oscillator").spec({"c": 0.5})
    s0 = DoubledState.from_lightcone(0.0, [1.0], [0.0], [0.0], [0.0])
    hs = [0.2, 0.1, 0.05, 0.025]
    errs = [abs(integrate_rk4(spec, s0, 10.0, hh).qplus[-1, 0] - oscillator_exact(0.5, 10.0)) for hh in hs]
    order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])

    cfg = sc.load_config(sc.bundled_path("oscillator_underdamped"))
    digests = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        sc.write_artifacts(str(out), sc.run_scenario(cfg))
        digests.append([(out / f).read_bytes() for f in ("trajectory.csv", "ledger.csv")])
    same = digests[0] == digests[1]
    ok = worst <= 1e-6 and abs(order - 4.0) <= 0.1 and same
    report(10, "jets vs differences, RK4 order, reruns", ok,
           f"jet error {worst:.1e}, RK4 order {order:.3f}, byte-identical {same}")
