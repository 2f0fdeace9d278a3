import math

import numpy as np
import pytest

import qmeas


def pure_ms(a1, a2):
    model = qmeas.MeasurementModel()
    psi_s = qmeas.StateVector(model.system_layout(), np.array([a1, a2], dtype=complex))
    u = qmeas.premeasurement_unitary(model)
    return model, qmeas.StateVector(model.ms_layout(), u @ qmeas.initial_state(model, psi_s).amplitudes)


def test_interference_value_and_null():
    h = 1 / math.sqrt(2)
    model, psi = pure_ms(h, h)
    b = qmeas.interference_observable(model)
    assert qmeas.expectation(psi, b) == pytest.approx(1.0, abs=1e-12)
    psi_s = qmeas.StateVector(model.system_layout(), np.array([h, h], dtype=complex))
    mixed = qmeas.gemenge_mix(qmeas.branch_gemenge(model, psi_s))
    assert abs(qmeas.expectation(mixed, b)) < 1e-12


def test_partial_trace_and_layouts():
    layout = qmeas.SpaceLayout([("S", 2), ("O", 3)])
    assert layout.total_dim == 6
    _, psi = pure_ms(math.sqrt(0.3), math.sqrt(0.7))
    rho = qmeas.density_from_vector(psi)
    reduced = qmeas.partial_trace(rho.matrix, layout, ["O"])
    np.testing.assert_allclose(np.diag(reduced).real, [0.0, 0.3, 0.7], atol=1e-12)


def test_algebra_closure_and_characters():
    layout = qmeas.SpaceLayout([("O", 3)])
    alg = qmeas.generate_algebra([np.diag([0.0, 1.0, -1.0]).astype(complex)], layout)
    assert alg.dimension == 3 and alg.commutative
    values = sorted(c["values"][0] for c in qmeas.extremal_states(alg))
    assert values == pytest.approx([-1.0, 0.0, 1.0])
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    full = qmeas.generate_algebra([x, z], qmeas.SpaceLayout([("H", 2)]))
    assert full.dimension == 4 and not full.commutative


def test_breuer_flip():
    a1, a2 = math.sqrt(0.3), math.sqrt(0.7)
    model, psi = pure_ms(a1, a2)
    psi_s = qmeas.StateVector(model.system_layout(), np.array([a1, a2], dtype=complex))
    pure = qmeas.density_from_vector(psi)
    mixed = qmeas.gemenge_mix(qmeas.branch_gemenge(model, psi_s))
    q_ext = np.kron(np.eye(2), qmeas.pointer_observable(model))
    u_o = qmeas.generate_algebra([q_ext], model.ms_layout())
    assert qmeas.breuer_indistinguishable(pure, mixed, u_o)["indistinguishable"]
    with_b = qmeas.generate_algebra([q_ext, qmeas.interference_observable(model)], model.ms_layout())
    report = qmeas.breuer_indistinguishable(pure, mixed, with_b)
    assert not report["indistinguishable"]
    assert report["max_deviation"] == pytest.approx(2 * a1 * a2, abs=1e-9)


def test_pipeline_is_deterministic():
    model = qmeas.MeasurementModel()
    pipeline = qmeas.MeasurementPipeline(model)
    psi_s = qmeas.StateVector(model.system_layout(), np.array([math.sqrt(0.3), math.sqrt(0.7)], dtype=complex))
    a = [e.pointer_index for e in pipeline.run_events(psi_s, 5000, 7)]
    b = [e.pointer_index for e in pipeline.run_events(psi_s, 5000, 7, threads=3)]
    assert a == b
    assert abs(a.count(1) / 5000 - 0.3) < 4 * math.sqrt(0.21 / 5000)


def test_run_scenario_and_errors():
    config = {
        "scenario-name": "wigner-friend",
        "input": {"amplitudes": [[0.7071, 0], [0.7071, 0]]},
        "n-events": 10000,
        "seed": 3,
    }
    report, events = qmeas.run_scenario(config)
    assert report["summary"]["external"]["interference-expectation"] == pytest.approx(1.0)
    assert len(events.strip().splitlines()) == 10001
    again, _ = qmeas.run_scenario(config)
    assert again == report

    config["input"]["amplitudes"] = [[0.9, 0], [0, 0]]
    with pytest.raises(qmeas.ValidationError, match="normalization"):
        qmeas.run_scenario(config)
    with pytest.raises(ValueError):
        qmeas.StateVector(qmeas.SpaceLayout([("S", 2)]), np.array([1.0, 1.0], dtype=complex))


def test_pointer_basis_and_stability():
    model = qmeas.MeasurementModel()
    model.environment = qmeas.EnvironmentConfig(3, 1.0, 0.0)
    _, psi = pure_ms(math.sqrt(0.3), math.sqrt(0.7))
    rho = qmeas.couple_environment(model, qmeas.density_from_vector(psi))
    result = qmeas.extract_pointer_basis(rho)
    assert result["status"] == "UNIQUE"
    assert result["weights"] == pytest.approx([0.7, 0.3])
    o1 = qmeas.StateVector.basis(model.pointer_layout(), 1)
    assert qmeas.pointer_state_stability(model, o1, [0.0, 0.5, 1.0]) == pytest.approx([1.0, 1.0, 1.0])
