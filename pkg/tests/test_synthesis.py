import numpy as np
import pytest

from ltisec import (
    AttackSequence,
    HorizonTooShort,
    LtiSystem,
    NoModes,
    NotExtensible,
    NotSynthesizable,
    SideInformation,
    ThetaNotFeasible,
    Tol,
    certify_undetectable,
    is_zero_state_inducing,
    weakly_unobservable,
)
from ltisec.synthesis import (
    extend_attack,
    find_zero_dynamics_modes,
    undetectable_from_theta,
    zero_dynamics_attack,
    zero_state_synthesize,
)

from oracles import rand_system, undetectable_oracle

# published numbers for the bundled flight-control scenario, rounded to the
# four digits they were released with
AIR_LAMBDA = 0.9779
AIR_G = np.array([0.032392, -0.001184, -0.639577, 0.300692])
AIR_THETA = np.array([0.639577, -0.300692, 0.000015, 0.0])


@pytest.fixture(scope="module")
def square_plant():
    # transfer function (z - 0.4) / ((z - 0.5)(z - 0.3)): one finite zero
    return LtiSystem(
        a=np.array([[0.5, 1.0], [0.0, 0.3]]),
        b=np.array([[0.0], [1.0]]),
        c=np.array([[0.1, 1.0]]),
        d=np.array([[0.0]]),
    )


def test_no_modes_without_actuation():
    sys = LtiSystem(a=np.array([[0.5, 1.0], [0.0, 0.3]]), b=np.zeros((2, 1)),
                    c=np.eye(2), d=np.array([[1.0], [1.0]]))
    with pytest.raises(NoModes):
        find_zero_dynamics_modes(sys)


def test_square_planted_zero(square_plant):
    modes = find_zero_dynamics_modes(square_plant)
    assert len(modes) == 1
    mode = modes[0]
    assert abs(mode.lam - 0.4) <= 1e-9
    assert mode.pencil_residual <= 1e-12
    # the state direction solves (lam I - A) theta = B g with C theta = 0
    lhs = (mode.lam * np.eye(2) - square_plant.a) @ mode.theta - square_plant.b @ mode.g
    assert np.linalg.norm(lhs) <= 1e-12
    assert abs(square_plant.c @ mode.theta.real)[0] <= 1e-12


def test_tall_planted_zero_found_by_compression(square_plant):
    # duplicate sensing with a row orthogonal to the zero direction keeps
    # the mode alive; it is not an eigenvalue of A, so only the random
    # row-compression sweep can surface it
    tall = LtiSystem(a=square_plant.a, b=square_plant.b,
                     c=np.array([[0.1, 1.0], [1.0, 10.0]]), d=np.zeros((2, 1)))
    modes = find_zero_dynamics_modes(tall)
    assert any(abs(m.lam - 0.4) <= 1e-6 for m in modes)


def test_wide_unstable_candidate_filtered():
    wide = LtiSystem(a=np.diag([0.5, 0.3]), b=np.eye(2),
                     c=np.array([[1.0, 1.0]]), d=np.zeros((1, 2)))
    kept = find_zero_dynamics_modes(wide, lambda_hints=[1.5])
    assert all(abs(m.lam) <= 1.0 + 1e-6 for m in kept)
    opened = find_zero_dynamics_modes(wide, lambda_hints=[1.5], allow_unstable=True)
    assert any(abs(m.lam - 1.5) <= 1e-9 for m in opened)


def test_aircraft_mode_matches_published_vector(aircraft_sys):
    modes = find_zero_dynamics_modes(aircraft_sys, lambda_hints=[AIR_LAMBDA])
    match = [m for m in modes if abs(m.lam - AIR_LAMBDA) < 1e-12]
    assert len(match) == 1
    mode = match[0]
    assert np.allclose(mode.g.real, AIR_G, atol=2e-3)
    assert np.allclose(mode.g.imag, 0.0, atol=1e-12)
    assert np.allclose(mode.theta.real, AIR_THETA, atol=2e-3)
    assert mode.pencil_residual <= 1e-12


def test_aircraft_modes_sorted_and_deduped(aircraft_sys):
    modes = find_zero_dynamics_modes(aircraft_sys, lambda_hints=[AIR_LAMBDA, AIR_LAMBDA])
    lams = [m.lam for m in modes]
    assert len(set(round(l.real, 9) + 1j * round(l.imag, 9) for l in lams)) == len(lams)
    keys = [(l.real, l.imag) for l in lams]
    assert keys == sorted(keys)
    assert all(l.imag >= -1e-15 for l in lams)


def test_attack_frames_follow_geometric_law(square_plant):
    mode = find_zero_dynamics_modes(square_plant)[0]
    attack = zero_dynamics_attack(mode, 6, scale=2.0)
    assert attack.horizon_t == 6
    for k in range(7):
        want = 2.0 * (0.4 ** k) * mode.g.real
        assert np.allclose(attack.frames[k], want, atol=1e-12)


def test_attack_at_lambda_zero_is_impulse():
    wide = LtiSystem(a=np.diag([0.5, 0.3]), b=np.eye(2),
                     c=np.array([[1.0, 1.0]]), d=np.zeros((1, 2)))
    modes = find_zero_dynamics_modes(wide, lambda_hints=[0.0])
    mode = [m for m in modes if abs(m.lam) < 1e-12][0]
    attack = zero_dynamics_attack(mode, 4)
    assert np.allclose(attack.frames[0], mode.g.real)
    assert np.allclose(attack.frames[1:], 0.0)


def test_aircraft_attack_matches_published_frames(aircraft_sys, aircraft_attack):
    modes = find_zero_dynamics_modes(aircraft_sys, lambda_hints=[AIR_LAMBDA])
    mode = [m for m in modes if abs(m.lam - AIR_LAMBDA) < 1e-12][0]
    attack = zero_dynamics_attack(mode, 30, scale=10.0)
    assert attack.frames.shape == aircraft_attack.frames.shape
    assert np.allclose(attack.frames, aircraft_attack.frames, atol=0.02)


def test_mode_attacks_certify_round_trip(rng):
    # restrict to moderate |lambda|: frames grow like |lambda|**k, and once
    # the dynamic range eats the 52-bit mantissa no verifier can cancel the
    # stacked response in double precision
    hits = 0
    for _ in range(40):
        sys = rand_system(rng)
        try:
            modes = find_zero_dynamics_modes(sys)
        except NoModes:
            continue
        usable = [m for m in modes if abs(m.lam) <= 2.0]
        if not usable:
            continue
        attack = zero_dynamics_attack(usable[0], 2 * sys.n)
        no_info = SideInformation.none(sys.n)
        cert = certify_undetectable(sys, no_info, attack)
        assert cert.undetectable
        assert undetectable_oracle(sys, np.zeros((1, sys.n)), attack)
        hits += 1
    assert hits >= 10


def test_zero_state_synthesize_aircraft(aircraft_sys):
    attack = zero_state_synthesize(aircraft_sys, 10, scale=3.0)
    assert not attack.is_zero
    assert attack.horizon_t == 10
    assert abs(np.linalg.norm(attack.frames[0]) - 3.0) <= 1e-9
    assert is_zero_state_inducing(aircraft_sys, attack)


def test_zero_state_attack_beats_full_rank_side_info(aircraft_sys):
    # knowing x(0) exactly does not help against an output-nulling attack
    attack = zero_state_synthesize(aircraft_sys, 10)
    full = SideInformation(np.eye(4))
    cert = certify_undetectable(aircraft_sys, full, attack)
    assert cert.undetectable
    assert np.linalg.norm(cert.induced_state) <= 1e-8


def test_zero_state_synthesize_blocked():
    sys = LtiSystem(a=np.eye(2), b=np.eye(2), c=np.eye(2), d=np.eye(2))
    with pytest.raises(NotSynthesizable):
        zero_state_synthesize(sys, 6)


def test_zero_state_synthesize_planted():
    # two actuators, one of which is invisible to the sensor for one step
    sys = LtiSystem(a=np.array([[0.5, 0.2], [0.1, 0.4]]),
                    b=np.array([[1.0, 0.0], [0.0, 1.0]]),
                    c=np.array([[0.0, 1.0]]),
                    d=np.array([[0.0, 1.0]]))
    attack = zero_state_synthesize(sys, 6)
    assert is_zero_state_inducing(sys, attack)
    assert np.linalg.norm(attack.frames[0]) > 0.0


def test_undetectable_from_theta_zero_is_zero(aircraft_sys, aircraft_side):
    attack = undetectable_from_theta(aircraft_sys, aircraft_side, np.zeros(4), 8)
    assert attack.is_zero
    assert attack.horizon_t == 8


def test_undetectable_from_theta_round_trip(aircraft_sys):
    no_info = SideInformation.none(4)
    modes = find_zero_dynamics_modes(aircraft_sys, lambda_hints=[AIR_LAMBDA])
    theta = [m for m in modes if abs(m.lam - AIR_LAMBDA) < 1e-12][0].theta.real * 5.0
    attack = undetectable_from_theta(aircraft_sys, no_info, theta, 12)
    cert = certify_undetectable(aircraft_sys, no_info, attack)
    assert cert.undetectable
    assert np.linalg.norm(cert.induced_state - theta) <= 1e-6 * np.linalg.norm(theta)


def test_undetectable_from_theta_rejects_visible_state(aircraft_sys, aircraft_side):
    modes = find_zero_dynamics_modes(aircraft_sys, lambda_hints=[AIR_LAMBDA])
    theta = [m for m in modes if abs(m.lam - AIR_LAMBDA) < 1e-12][0].theta.real
    assert abs(aircraft_side.omega @ theta)[0] > 0.1
    with pytest.raises(ThetaNotFeasible):
        undetectable_from_theta(aircraft_sys, aircraft_side, theta, 12)


def test_undetectable_from_theta_rejects_outside_v(aircraft_sys):
    v = weakly_unobservable(aircraft_sys)
    comp = np.eye(4) - v.basis @ v.basis.T
    norms = np.linalg.norm(comp, axis=0)
    outside = comp[:, int(np.argmax(norms))]
    outside /= np.linalg.norm(outside)
    no_info = SideInformation.none(4)
    with pytest.raises(ThetaNotFeasible):
        undetectable_from_theta(aircraft_sys, no_info, outside, 12)


def test_undetectable_from_theta_horizon_guard(aircraft_sys, aircraft_side):
    with pytest.raises(HorizonTooShort):
        undetectable_from_theta(aircraft_sys, aircraft_side, np.zeros(4), 2)


def test_extend_zero_attack(aircraft_sys, aircraft_side):
    attack = AttackSequence.zeros(4, 6)
    cert = certify_undetectable(aircraft_sys, aircraft_side, attack)
    longer = extend_attack(aircraft_sys, aircraft_side, attack, cert, 9)
    assert longer.horizon_t == 9
    assert longer.is_zero


def test_extend_aircraft_mode_attack(aircraft_sys):
    no_info = SideInformation.none(4)
    modes = find_zero_dynamics_modes(aircraft_sys, lambda_hints=[AIR_LAMBDA])
    mode = [m for m in modes if abs(m.lam - AIR_LAMBDA) < 1e-12][0]
    attack = zero_dynamics_attack(mode, 30, 10.0)
    cert = certify_undetectable(aircraft_sys, no_info, attack)
    longer = extend_attack(aircraft_sys, no_info, attack, cert, 34)
    assert longer.horizon_t == 34
    # the original frames survive bit for bit
    assert np.array_equal(longer.frames[:31], attack.frames)
    cert2 = certify_undetectable(aircraft_sys, no_info, longer)
    assert cert2.undetectable
    assert np.linalg.norm(cert2.induced_state - cert.induced_state) <= 1e-8


def test_extend_rejects_terminal_kernel_pulse(aircraft_sys, aircraft_side):
    # a final-frame pulse in ker D is silent over the original window but
    # parks the state outside V, so no silent continuation exists
    frames = np.zeros((7, 4))
    frames[-1, 0] = 1.0
    attack = AttackSequence(frames)
    cert = certify_undetectable(aircraft_sys, aircraft_side, attack)
    assert cert.undetectable
    with pytest.raises(NotExtensible):
        extend_attack(aircraft_sys, aircraft_side, attack, cert, 10)


def test_extend_requires_longer_horizon(aircraft_sys, aircraft_side):
    attack = AttackSequence.zeros(4, 6)
    cert = certify_undetectable(aircraft_sys, aircraft_side, attack)
    with pytest.raises(ValueError):
        extend_attack(aircraft_sys, aircraft_side, attack, cert, 6)


def test_extended_attacks_stay_undetectable(rng):
    hits = 0
    for _ in range(30):
        sys = rand_system(rng)
        no_info = SideInformation.none(sys.n)
        v = weakly_unobservable(sys)
        if v.dim == 0:
            continue
        theta = v.basis @ rng.standard_normal(v.dim)
        try:
            attack = undetectable_from_theta(sys, no_info, theta, sys.n)
        except ThetaNotFeasible:
            continue
        cert = certify_undetectable(sys, no_info, attack)
        if not cert.undetectable:
            continue
        try:
            longer = extend_attack(sys, no_info, attack, cert, sys.n + 4)
        except NotExtensible:
            continue
        assert certify_undetectable(sys, no_info, longer).undetectable
        assert np.array_equal(longer.frames[: sys.n + 1], attack.frames)
        hits += 1
    assert hits >= 8
