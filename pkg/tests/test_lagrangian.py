import numpy as np
import pytest

from ncmech import expr as ex
from ncmech import models as mdl
from ncmech.errors import AntisymmetryError, NonRegularError
from ncmech.hamiltonian import momenta
from ncmech.lagrangian import (
    DoubledState,
    SystemSpec,
    accelerations,
    from_lightcone,
    lambda_value,
    mass_matrix,
    nonconservative_forces,
    residual_eom,
    sector_euler_lagrange,
    to_lightcone,
)

KGEN = "-(c/2)*(q1[0]*v2[0] - q2[0]*v1[0])"


def rand_state(rng, n, shift=0.0):
    q1, v1, q2, v2 = rng.uniform(-1, 1, size=(4, n))
    return DoubledState(float(rng.uniform(0, 1)), q1 + shift, v1, q2 + shift, v2)


def states_for(entry, rng, count):
    shift = 1.5 if entry.kind in ("central", "two_body") else 0.0
    return [rand_state(rng, entry.n, shift) for _ in range(count)]


def test_assemble_conservative():
    spec = SystemSpec(1, "m*v[0]^2/2", "0", {"m": 2.0})
    s = DoubledState(0.0, [0.3], [1.0], [-0.2], [3.0])
    assert lambda_value(spec, s) == pytest.approx(0.5 * 2 * (1.0 - 9.0))


def test_free_fall_lambda_has_gravity_term():
    spec = mdl.get_model("free_fall").spec({"g": 2.0, "c": 0.0})
    s = DoubledState(0.0, [1.5], [0.0], [0.5], [0.0])
    assert lambda_value(spec, s) == pytest.approx(2.0 * (1.5 - 0.5))


def test_bateman_lambda():
    spec = mdl.get_model("damped_oscillator").spec({"m": 1.0, "w": 1.3, "c": 0.7})
    rng = np.random.default_rng(0)
    for _ in range(20):
        s = rand_state(rng, 1)
        q1, v1, q2, v2 = s.q1[0], s.v1[0], s.q2[0], s.v2[0]
        want = 0.5 * (v1 ** 2 - v2 ** 2) - 0.5 * 1.3 ** 2 * (q1 ** 2 - q2 ** 2) - 0.35 * (q1 * v2 - q2 * v1)
        assert lambda_value(spec, s) == pytest.approx(want, abs=1e-14)


def test_mass_matrix_examples():
    spec = SystemSpec(1, "m*v[0]^2/2", "0", {"m": 2.0})
    M, det = mass_matrix(spec, DoubledState(0.0, [0.0], [0.0], [0.0], [0.0]))
    assert np.allclose(M, [[2, 0], [0, -2]])
    assert det == pytest.approx(-4.0)

    quad = mdl.get_model("polynomial_drag").spec()
    M, _ = mass_matrix(quad, DoubledState(0.0, [0.4], [1.0], [0.1], [0.6]))
    assert M[0, 1] != 0.0


def test_mass_matrix_symmetric_everywhere():
    rng = np.random.default_rng(1)
    for entry in mdl.catalog().values():
        spec = entry.spec()
        for s in states_for(entry, rng, 10):
            M, _ = mass_matrix(spec, s)
            assert np.max(np.abs(M - M.T)) <= 1e-12


def test_symmetric_k_rejected():
    with pytest.raises(AntisymmetryError):
        SystemSpec(1, "v[0]^2/2", "q1[0]*q2[0]")


def test_degenerate_lagrangian():
    spec = SystemSpec(1, "q[0]*v[0]", "0")
    with pytest.raises(NonRegularError):
        accelerations(spec, DoubledState(0.0, [1.0], [1.0], [0.5], [0.2]))


def test_free_particle_accelerations():
    spec = mdl.get_model("free_particle").spec({"m": 1.0, "c": 1.0})
    rng = np.random.default_rng(2)
    for s in (rand_state(rng, 1) for _ in range(20)):
        a = accelerations(spec, s)
        assert a.aplus == pytest.approx(-s.vplus, abs=1e-14)
        assert a.aminus == pytest.approx(s.vminus, abs=1e-14)


def test_oscillator_accelerations():
    spec = mdl.get_model("damped_oscillator").spec({"m": 1.0, "w": 1.0, "c": 1.0})
    rng = np.random.default_rng(3)
    for s in (rand_state(rng, 1) for _ in range(20)):
        a = accelerations(spec, s)
        assert a.aplus == pytest.approx(-s.vplus - s.qplus, abs=1e-14)
        assert a.aminus == pytest.approx(s.vminus - s.qminus, abs=1e-14)


def test_conservative_limit_gives_two_copies():
    spec = SystemSpec(1, "v[0]^2/2 - q[0]^4/4", "0")
    s = DoubledState(0.0, [0.7], [0.1], [-1.2], [0.3])
    a = accelerations(spec, s)
    assert a.a1[0] == pytest.approx(-0.7 ** 3)
    assert a.a2[0] == pytest.approx(1.2 ** 3)


def test_nonconservative_forces_linear():
    spec = mdl.get_model("free_particle").spec({"c": 0.8})
    s = DoubledState(0.0, [0.3], [1.1], [-0.4], [0.6])
    a = accelerations(spec, s)
    f1, f2 = nonconservative_forces(spec, s, a)
    assert f1[0] == pytest.approx(-0.8 * 0.6)
    assert f2[0] == pytest.approx(0.8 * 1.1)
    el1, el2 = sector_euler_lagrange(spec, s, a)
    assert el1[0] == pytest.approx(-f1[0])
    assert el2[0] == pytest.approx(f2[0])


def test_nonconservative_forces_zero_k():
    spec = SystemSpec(1, "v[0]^2/2", "0")
    s = DoubledState(0.0, [0.3], [1.1], [-0.4], [0.6])
    f1, f2 = nonconservative_forces(spec, s, accelerations(spec, s))
    assert f1[0] == 0.0 and f2[0] == 0.0


def test_polynomial_drag_linear_part_matches_kgen():
    # -q- c1 v+ differs from the linear drag K with c = c1/2 by a total derivative
    quad = mdl.get_model("polynomial_drag").spec({"c1": 0.6, "c2": 0.0})
    lin = mdl.get_model("free_particle").spec({"c": 0.3})
    rng = np.random.default_rng(4)
    for s in (rand_state(rng, 1) for _ in range(10)):
        fq = nonconservative_forces(quad, s, accelerations(quad, s))
        fl = nonconservative_forces(lin, s, accelerations(lin, s))
        assert np.allclose(fq, fl, atol=1e-14)


def test_lightcone_examples():
    lc = to_lightcone(DoubledState(0.0, [1.0], [0.0], [1.0], [0.0]))
    assert lc.qp[0] == 1.0 and lc.qm[0] == 0.0
    lc = to_lightcone(DoubledState(0.0, [3.0], [0.0], [1.0], [0.0]))
    assert lc.qp[0] == 2.0 and lc.qm[0] == 1.0


def test_lightcone_roundtrip_exact():
    # dyadic grid values make both directions exact
    rng = np.random.default_rng(5)
    for _ in range(1000):
        q1, v1, q2, v2 = rng.integers(-2 ** 20, 2 ** 20, size=(4, 3)) / 2 ** 10
        s = DoubledState(0.0, q1, v1, q2, v2)
        back = from_lightcone(to_lightcone(s))
        assert np.array_equal(back.as_vector(), s.as_vector())


def test_residual_vanishes_at_solution():
    rng = np.random.default_rng(6)
    for entry in mdl.catalog().values():
        spec = entry.spec()
        for s in states_for(entry, rng, 10):
            r = residual_eom(spec, s, accelerations(spec, s))
            assert np.max(np.abs(r)) <= 1e-10


def test_trivial_solution_consistent():
    # with q- = v- = 0 and a- = 0, the q+ equation is solved by the physical acceleration
    rng = np.random.default_rng(7)
    for entry in mdl.catalog().values():
        spec = entry.spec()
        for s in states_for(entry, rng, 5):
            s = DoubledState.from_lightcone(s.t, s.qplus, s.vplus, 0 * s.qplus, 0 * s.vplus)
            a = accelerations(spec, s)
            assert np.max(np.abs(a.aminus)) <= 1e-12
            r = residual_eom(spec, s, (a.aplus, a.aplus))
            assert np.max(np.abs(r)) <= 1e-10


def test_lambda_vanishes_on_diagonal():
    rng = np.random.default_rng(8)
    for entry in mdl.catalog().values():
        spec = entry.spec()
        for s in states_for(entry, rng, 100):
            d = DoubledState(s.t, s.q1, s.v1, s.q1, s.v1)
            assert abs(lambda_value(spec, d)) <= 1e-12


def test_p_minus_vanishes_in_physical_limit():
    rng = np.random.default_rng(9)
    for entry in mdl.catalog().values():
        spec = entry.spec()
        for s in states_for(entry, rng, 20):
            s = DoubledState(s.t, s.q1, s.v1, s.q1, s.v1)
            ph = momenta(spec, s)
            assert np.max(np.abs(ph.pminus)) <= 1e-12


def test_total_derivative_gauge():
    # adding d/dt f(q1, q2) with antisymmetric f leaves the motion unchanged
    base = mdl.get_model("damped_oscillator").spec({"c": 0.4})
    f = "sin(q1[0])*q2[0]^2 - sin(q2[0])*q1[0]^2"
    fe = ex.parse(f)
    d1 = "(cos(q1[0])*q2[0]^2 - 2*sin(q2[0])*q1[0])*v1[0]"
    d2 = "(2*sin(q1[0])*q2[0] - cos(q2[0])*q1[0]^2)*v2[0]"
    gauged = SystemSpec(1, base.L, ex.parse(f"({ex.to_string(base.K)}) + {d1} + {d2}"), base.params)
    rng = np.random.default_rng(10)
    for s in (rand_state(rng, 1) for _ in range(20)):
        a0 = accelerations(base, s).A
        a1 = accelerations(gauged, s).A
        assert np.max(np.abs(a0 - a1)) <= 1e-9
    assert ex.check_antisymmetry(fe, 1)


def test_decoupling_at_zero_k():
    spec = SystemSpec(1, "v[0]^2/2 - q[0]^4/4 - q[0]^2/2", "0")
    s = DoubledState(0.0, [0.4], [0.9], [-0.8], [0.2])
    swapped = DoubledState(0.0, [-0.8], [0.2], [0.4], [0.9])
    a = accelerations(spec, s)
    b = accelerations(spec, swapped)
    assert a.a1[0] == pytest.approx(b.a2[0]) and a.a2[0] == pytest.approx(b.a1[0])
