"""Propagation routes, conserved-product drift, and integrator accuracy order."""

import numpy as np
import pytest

from kgmetric import (
    FieldState,
    InnerProductSpec,
    check_pseudo_unitary,
    drift_report,
    eta_plus,
    evolve_field,
    evolve_schrodinger,
    field_trajectory,
    pack,
    solution_inner,
    unpack,
)
from kgmetric.errors import NonFiniteStateError, ZeroStepsError
from kgmetric.models.lattice import KleinGordonLattice, kg_mode_solution
from kgmetric.rng import generator, random_positive_hermitian, random_state
from kgmetric.spectral import hermitian_eigendecompose


def maxabs(a):
    return float(np.max(np.abs(a)))


def test_unit_operator_half_period_is_minus_identity():
    f0 = FieldState(psi=np.array([1.0 + 0j]), psi_dot=np.array([0.0 + 0j]))
    result = evolve_schrodinger(np.array([[1.0]]), pack(f0, 1.0), 0.0, np.pi, 50)
    assert maxabs(result.propagator + np.eye(2)) <= 1e-12


def test_constant_operator_propagation_is_exact():
    # constant sources use one exact step exponential: cos(2 t) to roundoff
    omega = 2.0
    f0 = FieldState(psi=np.array([1.0 + 0j]), psi_dot=np.array([0.0 + 0j]))
    result = evolve_schrodinger(
        np.array([[omega**2]]), pack(f0, 1.0), 0.0, 10.0, 1000, sample_every=100
    )
    for t, state in result.samples:
        f = unpack(state)
        assert abs(f.psi[0] - np.cos(omega * t)) <= 1e-12
        assert abs(f.psi_dot[0] + omega * np.sin(omega * t)) <= 1e-12


def test_two_routes_agree_for_time_dependent_operator():
    rng = generator(0, "evo:routes")
    n = 3
    d0 = random_positive_hermitian(rng, n)

    def d_of_t(t):
        return (2.0 + np.sin(t)) * d0

    f0 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    result = evolve_schrodinger(d_of_t, pack(f0, 1.0), 0.0, 2.0, 8000)
    f_mid = unpack(result.state(-1))
    traj = evolve_field(d_of_t, f0, 0.0, 2.0, 2000)
    f_rk4 = traj.state(-1)
    assert maxabs(f_mid.psi - f_rk4.psi) <= 1e-6
    assert maxabs(f_mid.psi_dot - f_rk4.psi_dot) <= 1e-6


def test_field_route_free_particle_is_linear():
    f0 = FieldState(
        psi=np.array([1.0 + 2.0j, -0.5 + 0j]), psi_dot=np.array([0.5 - 1.0j, 2.0 + 0j])
    )
    traj = evolve_field(np.zeros((2, 2)), f0, 0.0, 3.0, 30)
    for i, t in enumerate(traj.times):
        f = traj.state(i)
        assert maxabs(f.psi - (f0.psi + t * f0.psi_dot)) <= 1e-12
        assert maxabs(f.psi_dot - f0.psi_dot) <= 1e-12


def test_field_route_oscillator_accuracy():
    omega = 2.0
    f0 = FieldState(psi=np.array([1.0 + 0j]), psi_dot=np.array([0.0 + 0j]))
    traj = evolve_field(np.array([[omega**2]]), f0, 0.0, 10.0, 10000)
    f = traj.state(-1)
    assert abs(f.psi[0] - np.cos(omega * 10.0)) <= 1e-8
    assert abs(f.psi_dot[0] + omega * np.sin(omega * 10.0)) <= 1e-8


def test_field_route_lattice_mode_phase():
    lattice = KleinGordonLattice(sites=8, mu=1.0)
    j = 2
    f0 = kg_mode_solution(lattice, eps=1, j=j, t=0.0)
    omega = lattice.omegas[lattice.column_of(j)]
    traj = evolve_field(lattice.d_matrix, f0, 0.0, 5.0, 5000)
    f = traj.state(-1)
    want = kg_mode_solution(lattice, eps=1, j=j, t=5.0)
    assert maxabs(f.psi - want.psi) <= 1e-6
    assert maxabs(f.psi_dot - want.psi_dot) <= 1e-6
    assert abs(omega**2 - lattice.omega_sq[lattice.column_of(j)]) <= 1e-12


def test_drift_constant_operator_stays_flat():
    rng = generator(1, "evo:drift-const")
    n = 3
    d = random_positive_hermitian(rng, n)
    d_spec = hermitian_eigendecompose(d)
    spec = InnerProductSpec.uniform(n)
    f0 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    traj = evolve_field(d, f0, 0.0, 10.0, 5000, sample_every=10)
    table = drift_report(traj, d_spec, spec, monitors=("solution_inner", "kg_inner"))
    assert table.max_deviation <= 1e-8
    assert table.monitors["solution_inner"].max_deviation <= 1e-8
    assert table.monitors["kg_inner"].max_deviation <= 1e-8


def test_drift_time_dependent_instantaneous_vs_frozen():
    rng = generator(2, "evo:drift-td")
    n = 3
    d0 = random_positive_hermitian(rng, n)

    def spec_of_t(t):
        return hermitian_eigendecompose((1.0 + 0.3 * np.sin(t)) * d0)

    f0 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    traj = evolve_field(
        lambda t: (1.0 + 0.3 * np.sin(t)) * d0, f0, 0.0, 6.0, 3000, sample_every=30
    )
    table = drift_report(
        traj,
        spec_of_t,
        InnerProductSpec.uniform(n),
        monitors=("solution_inner", "frozen_inner"),
    )
    # the instantaneous product visibly moves; the frozen one cannot
    assert table.monitors["solution_inner"].max_deviation >= 1e-6
    assert table.monitors["frozen_inner"].max_deviation == 0.0


def exact_decaying_frequency(t):
    # psi'' + (5/4)/(1+t)^2 psi = 0 with psi(0)=1, psi'(0)=1/2 has the
    # closed solution sqrt(1+t) cos(log(1+t))
    s = 1.0 + t
    return np.sqrt(s) * np.cos(np.log(s))


def run_error(route, steps):
    f0 = FieldState(psi=np.array([1.0 + 0j]), psi_dot=np.array([0.5 + 0j]))

    def d_of_t(t):
        return np.array([[1.25 / (1.0 + t) ** 2]])

    if route == "midpoint":
        result = evolve_schrodinger(d_of_t, pack(f0, 1.0), 0.0, 2.0, steps)
        f = unpack(result.state(-1))
    else:
        traj = evolve_field(d_of_t, f0, 0.0, 2.0, steps)
        f = traj.state(-1)
    return abs(f.psi[0] - exact_decaying_frequency(2.0))


def test_doubled_route_is_second_order():
    e1, e2 = run_error("midpoint", 100), run_error("midpoint", 200)
    ratio = e1 / e2
    print(f"midpoint errors {e1:.3e} -> {e2:.3e}, ratio {ratio:.2f}")
    assert 3.0 <= ratio <= 5.0


def test_field_route_is_fourth_order():
    e1, e2 = run_error("rk4", 25), run_error("rk4", 50)
    ratio = e1 / e2
    print(f"rk4 errors {e1:.3e} -> {e2:.3e}, ratio {ratio:.2f}")
    assert 13.0 <= ratio <= 19.0


def test_propagator_composition():
    rng = generator(3, "evo:compose")
    n = 2
    d0 = random_positive_hermitian(rng, n)

    def d_of_t(t):
        return (1.5 + 0.5 * np.cos(t)) * d0

    f0 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    s0 = pack(f0, 1.0)
    u_a = evolve_schrodinger(d_of_t, s0, 0.0, 1.0, 500).propagator
    s_mid = evolve_schrodinger(d_of_t, s0, 0.0, 1.0, 500).state(-1)
    u_b = evolve_schrodinger(d_of_t, s_mid, 1.0, 2.0, 500).propagator
    u_ab = evolve_schrodinger(d_of_t, s0, 0.0, 2.0, 1000).propagator
    assert maxabs(u_b @ u_a - u_ab) <= 1e-9


def test_pseudo_unitarity_along_flow():
    rng = generator(4, "evo:pu-flow")
    n = 3
    d = random_positive_hermitian(rng, n)
    d_spec = hermitian_eigendecompose(d)
    eta0 = eta_plus(d_spec, 1.0)
    f0 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    result = evolve_schrodinger(
        d, pack(f0, 1.0), 0.0, 5.0, 500, sample_every=50, store_propagators=True
    )
    assert result.propagator_samples is not None
    assert maxabs(result.propagator_samples[0] - np.eye(2 * n)) <= 1e-15
    for u in result.propagator_samples:
        assert check_pseudo_unitary(u, eta0, tol=1e-9).passed


def test_trajectory_sampling_and_lookup():
    f0 = FieldState(psi=np.array([1.0 + 0j]), psi_dot=np.array([0.0 + 0j]))
    result = evolve_schrodinger(np.array([[1.0]]), pack(f0, 1.0), 0.0, 1.0, 10, sample_every=3)
    # steps 3, 6, 9 plus forced endpoint 10 plus initial
    np.testing.assert_allclose(result.times, [0.0, 0.3, 0.6, 0.9, 1.0], atol=1e-12)
    traj = field_trajectory(result)
    assert traj.n == 1 and len(traj) == len(result)
    f = traj.at_time(0.6)
    assert abs(f.psi[0] - np.cos(0.6)) <= 1e-12
    with pytest.raises(Exception):
        traj.at_time(0.45)


def test_step_count_validation_and_blowup_guard():
    f0 = FieldState(psi=np.array([1.0 + 0j]), psi_dot=np.array([0.0 + 0j]))
    with pytest.raises(ZeroStepsError):
        evolve_schrodinger(np.array([[1.0]]), pack(f0, 1.0), 0.0, 1.0, 0)
    with pytest.raises(ZeroStepsError):
        evolve_field(np.array([[1.0]]), f0, 0.0, 1.0, -2)
    # an inverted mode grows like e^t; the guard trips long before overflow
    with pytest.raises(NonFiniteStateError):
        evolve_schrodinger(
            np.array([[-1.0]]), pack(f0, 1.0), 0.0, 40.0, 400, allow_complex=True
        )


def test_solution_product_conserved_by_doubled_route():
    rng = generator(5, "evo:conserve")
    n = 4
    d = random_positive_hermitian(rng, n)
    d_spec = hermitian_eigendecompose(d)
    spec = InnerProductSpec(rng.uniform(0.2, 3.0, n), rng.uniform(0.2, 3.0, n))
    f1 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    f2 = FieldState(psi=random_state(rng, n), psi_dot=random_state(rng, n))
    v0 = solution_inner(f1, f2, d_spec, spec)
    r1 = evolve_schrodinger(d, pack(f1, 1.0), 0.0, 7.0, 700)
    r2 = evolve_schrodinger(d, pack(f2, 1.0), 0.0, 7.0, 700)
    v1 = solution_inner(unpack(r1.state(-1)), unpack(r2.state(-1)), d_spec, spec)
    assert abs(v1 - v0) <= 1e-10 * max(abs(v0), 1.0)
