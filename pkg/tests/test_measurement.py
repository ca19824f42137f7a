import math

import numpy as np
import pytest

from rsp_sim import (
    ALICE_H,
    ALICE_V,
    BOB_H,
    BOB_V,
    SOURCE_H,
    SOURCE_V,
    HeraldPattern,
    ImpossibleHeraldError,
    ModeMismatchError,
    Projector,
    ZeroProbabilityError,
    apply,
    condition_on_povm,
    extend_modes,
    herald,
    inner_product,
    make_fock,
    operator_distance,
    partial_polarizer_povm,
    project,
    superpose,
    tensor,
    to_density,
)
from rsp_sim.protocol import alice_measurement_ket, shared_state, splitting_unitary
from helpers import ALL_MODES, reference_shared_ket

RNG = np.random.default_rng(91525)


def _split_source():
    source = extend_modes(make_fock([(SOURCE_H, 2), (SOURCE_V, 2)]), ALL_MODES)
    return apply(splitting_unitary(), source)


def test_herald_one_alice_three_bob():
    out = _split_source()
    prob, conditional = herald(
        out, HeraldPattern([((ALICE_H, ALICE_V), 1), ((BOB_H, BOB_V), 3)])
    )
    assert abs(prob - 0.25) < 1e-12
    reference = extend_modes(reference_shared_ket(2), ALL_MODES)
    assert abs(abs(inner_product(reference, conditional)) - 1.0) < 1e-12


def test_herald_trivial_pattern_keeps_state():
    state = make_fock([(ALICE_H, 1)])
    prob, conditional = herald(state, HeraldPattern([((ALICE_H,), 1)]))
    assert prob == 1.0
    assert conditional.amplitude((1,)) == 1.0


def test_herald_all_four_at_alice():
    out = _split_source()
    prob, conditional = herald(out, HeraldPattern([((ALICE_H, ALICE_V), 4)]))
    assert abs(prob - 1.0 / 16.0) < 1e-12
    assert abs(abs(conditional.amplitude((0, 0, 2, 2, 0, 0))) - 1.0) < 1e-12


def test_herald_impossible_pattern_is_flagged():
    state = extend_modes(make_fock([(SOURCE_H, 2), (SOURCE_V, 2)]), ALL_MODES)
    with pytest.raises(ImpossibleHeraldError):
        herald(state, HeraldPattern([((ALICE_H, ALICE_V), 1), ((BOB_H, BOB_V), 3)]))


def test_herald_validates_pattern():
    state = make_fock([(ALICE_H, 1)])
    with pytest.raises(ValueError):
        HeraldPattern([((ALICE_H,), 1), ((ALICE_H, ALICE_V), 1)])  # overlap
    with pytest.raises(ValueError):
        herald(state, HeraldPattern([((ALICE_H,), 2)]))  # more than present
    with pytest.raises(ModeMismatchError):
        herald(state, HeraldPattern([((BOB_H,), 1)]))


def test_project_balanced_measurement_prepares_balanced_remote():
    _, shared = shared_state(2)
    phi = Projector(alice_measurement_ket(math.pi / 8, 0.0))
    prob, remote = project(shared, phi)
    assert abs(prob - 0.5) < 1e-12
    inv = 1.0 / math.sqrt(2.0)
    target = superpose([
        (inv, make_fock([(BOB_H, 2), (BOB_V, 1)])),
        (inv, make_fock([(BOB_H, 1), (BOB_V, 2)])),
    ])
    assert abs(abs(inner_product(target, remote)) - 1.0) < 1e-12


def test_project_h_outcome_reads_off_other_branch():
    _, shared = shared_state(2)
    phi = Projector(make_fock([(ALICE_H, 1), (ALICE_V, 0)]))
    prob, remote = project(shared, phi)
    assert abs(prob - 0.5) < 1e-12
    assert abs(abs(remote.amplitude((1, 2))) - 1.0) < 1e-12


def test_project_orthogonal_state_has_zero_probability():
    gamma, theta = 0.3, 1.1
    phi = alice_measurement_ket(gamma, theta)
    phi_perp = superpose([
        (-np.exp(-1j * theta) * math.sin(2 * gamma),
         make_fock([(ALICE_H, 1), (ALICE_V, 0)])),
        (math.cos(2 * gamma), make_fock([(ALICE_H, 0), (ALICE_V, 1)])),
    ]).normalized()
    assert abs(inner_product(phi, phi_perp)) < 1e-12
    joint = tensor(phi, make_fock([(BOB_H, 2), (BOB_V, 1)]))
    with pytest.raises(ZeroProbabilityError):
        project(joint, Projector(phi_perp))


def test_projection_outcomes_are_complete():
    _, shared = shared_state(2)
    for _ in range(50):
        gamma = float(RNG.uniform(0, math.pi / 4))
        theta = float(RNG.uniform(0, 2 * math.pi))
        phi = alice_measurement_ket(gamma, theta)
        phi_perp = superpose([
            (-np.exp(-1j * theta) * math.sin(2 * gamma),
             make_fock([(ALICE_H, 1), (ALICE_V, 0)])),
            (math.cos(2 * gamma), make_fock([(ALICE_H, 0), (ALICE_V, 1)])),
        ]).normalized()
        p1, _ = project(shared, Projector(phi))
        p2, _ = project(shared, Projector(phi_perp))
        assert abs(p1 + p2 - 1.0) < 1e-12


def test_remote_state_carries_alice_settings():
    # measuring (cos2g, e^{i t} sin2g) at Alice leaves Bob in
    # sin2g |2,1> + e^{i t} cos2g |1,2>, as a density-matrix identity
    from rsp_sim.protocol import closed_form_bob_ket

    _, shared = shared_state(2)
    for _ in range(50):
        gamma = float(RNG.uniform(0, math.pi / 4))
        theta = float(RNG.uniform(0, 2 * math.pi))
        _, remote = project(shared, Projector(alice_measurement_ket(gamma, theta)))
        target = closed_form_bob_ket(2, gamma, theta)
        assert operator_distance(to_density(remote), to_density(target)) < 1e-12


def test_partial_polarizer_limits():
    phi = Projector(make_fock([(ALICE_H, 1), (ALICE_V, 0)]))
    sharp = partial_polarizer_povm(phi, 1.0)
    # basis is ((0,1), (1,0)): the H ket sits at index 1
    assert np.allclose(sharp.operator, [[0.0, 0.0], [0.0, 1.0]], atol=1e-15)
    flat = partial_polarizer_povm(phi, 0.0)
    assert np.allclose(flat.operator, 0.5 * np.eye(2), atol=1e-15)


def test_partial_polarizer_half_strength_on_h():
    phi = Projector(make_fock([(ALICE_H, 1), (ALICE_V, 0)]))
    element = partial_polarizer_povm(phi, 0.5)
    # basis is ((0,1), (1,0)): V first, H second
    assert abs(element.entry((1, 0), (1, 0)) - 0.75) < 1e-15
    assert abs(element.entry((0, 1), (0, 1)) - 0.25) < 1e-15


def test_partial_polarizer_rejects_bad_strength():
    phi = Projector(make_fock([(ALICE_H, 1), (ALICE_V, 0)]))
    with pytest.raises(ValueError):
        partial_polarizer_povm(phi, 1.2)
    with pytest.raises(ValueError):
        partial_polarizer_povm(phi, -0.1)


def test_povm_at_full_strength_matches_projection():
    _, shared = shared_state(2)
    phi = Projector(alice_measurement_ket(0.27, 0.9))
    p_proj, remote = project(shared, phi)
    p_povm, rho = condition_on_povm(shared, partial_polarizer_povm(phi, 1.0))
    assert abs(p_proj - p_povm) < 1e-12
    assert operator_distance(rho, to_density(remote)) < 1e-12


def test_povm_at_zero_strength_leaves_maximal_mixture():
    _, shared = shared_state(2)
    phi = Projector(alice_measurement_ket(0.27, 0.9))
    _, rho = condition_on_povm(shared, partial_polarizer_povm(phi, 0.0))
    assert abs(rho.entry((2, 1), (2, 1)) - 0.5) < 1e-12
    assert abs(rho.entry((1, 2), (1, 2)) - 0.5) < 1e-12
    assert abs(rho.entry((2, 1), (1, 2))) < 1e-12


def test_povm_intermediate_strength_purity():
    _, shared = shared_state(2)
    phi = Projector(alice_measurement_ket(math.pi / 8, 0.0))
    _, rho = condition_on_povm(shared, partial_polarizer_povm(phi, 0.6))
    purity = float(np.trace(rho.matrix @ rho.matrix).real)
    assert abs(purity - 0.68) < 1e-12


def test_povm_output_is_physical():
    _, shared = shared_state(2)
    for p in (0.0, 0.3, 0.6, 1.0):
        phi = Projector(alice_measurement_ket(0.19, 2.3))
        prob, rho = condition_on_povm(shared, partial_polarizer_povm(phi, p))
        assert 0.0 < prob <= 1.0
        rho.validate()


def test_projector_requires_normalized_target():
    with pytest.raises(ValueError):
        Projector(superpose([
            (0.9, make_fock([(ALICE_H, 1), (ALICE_V, 0)])),
            (0.9, make_fock([(ALICE_H, 0), (ALICE_V, 1)])),
        ]))
