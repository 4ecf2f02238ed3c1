import math

import numpy as np
import pytest

from qcs_gauss import channels, core, oracle, states
from qcs_gauss.channels import GaussianChannel
from qcs_gauss.errors import DimensionMismatch
from qcs_gauss.reference import cat_decay_slope


def assert_same_state(a, b, atol=1e-14):
    np.testing.assert_array_equal(a.log_coeffs, b.log_coeffs)
    np.testing.assert_allclose(a.means, b.means, atol=atol)
    np.testing.assert_allclose(a.covs, b.covs, atol=atol)


def test_identity_leaves_state_unchanged():
    cat = states.cat(1.2)
    assert_same_state(channels.identity()(cat), cat, atol=0)


def test_unit_transmissivity_is_identity():
    gkp = states.gkp(0.3)
    assert_same_state(channels.loss(1.0)(gkp), gkp, atol=0)


def test_loss_fixes_vacuum():
    for eta in (0.1, 0.5, 0.9):
        np.testing.assert_allclose(channels.loss(eta)(states.vacuum()).covs[0], np.eye(2) / 2, atol=1e-15)


def test_loss_rejects_out_of_range():
    for eta in (0.0, -0.1, 1.2):
        with pytest.raises(ValueError):
            channels.loss(eta)


def test_apply_keeps_terms_and_coefficients():
    state = states.gkp(0.25, 1, 1j)
    for ch in (channels.loss(0.6), channels.rotation(0.3), channels.squeezing(0.2), channels.displacement([1, 2])):
        out = ch(state)
        assert out.n_terms == state.n_terms
        np.testing.assert_array_equal(out.log_coeffs, state.log_coeffs)


def test_loss_semigroup():
    a, b = 0.8, 0.55
    composed = channels.compose(channels.loss(a), channels.loss(b))
    direct = channels.loss(a * b)
    np.testing.assert_allclose(composed.X, direct.X, atol=1e-14)
    np.testing.assert_allclose(composed.Y, direct.Y, atol=1e-14)
    np.testing.assert_allclose(composed.d, direct.d, atol=1e-14)
    state = states.cat(1.7 + 0.4j)
    two_step = channels.loss(b)(channels.loss(a)(state))
    assert_same_state(two_step, direct(state))


def test_then_is_compose():
    first, second = channels.squeezing(0.3), channels.displacement([0.5, -1.0])
    state = states.cat(1.0)
    assert_same_state(first.then(second)(state), second(first(state)))


@pytest.mark.parametrize(
    "ch",
    [
        channels.rotation(0.7),
        channels.squeezing(-0.4),
        channels.displacement([1.0, 2.0]),
        channels.rotation(1.1, mode=1, n_modes=2),
        channels.squeezing(0.5, mode=0, n_modes=3),
    ],
)
def test_unitary_constructors_are_symplectic(ch):
    assert channels.is_symplectic(ch.X)
    assert channels.is_completely_positive(ch)


def test_loss_is_completely_positive_but_not_symplectic():
    ch = channels.loss(0.4)
    assert channels.is_completely_positive(ch)
    assert not channels.is_symplectic(ch.X)


def test_raw_triples_skip_positivity_check():
    # amplification without added noise is not a physical channel, but it can be built
    gain = GaussianChannel(math.sqrt(1.2) * np.eye(2), -0.1 * np.eye(2), np.zeros(2))
    assert not channels.is_completely_positive(gain)
    np.testing.assert_allclose(gain(states.vacuum()).covs[0], np.eye(2) / 2)


def test_raw_triples_check_shapes():
    with pytest.raises(DimensionMismatch):
        GaussianChannel(np.eye(2), np.eye(3), np.zeros(2))
    with pytest.raises(ValueError):
        GaussianChannel(np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros(2))


def test_mode_count_mismatch():
    with pytest.raises(DimensionMismatch):
        channels.loss(0.5, n_modes=2)(states.vacuum())
    with pytest.raises(DimensionMismatch):
        channels.rotation(0.1, mode=2, n_modes=2)


def test_squeezing_vacuum_gives_squeezed_vacuum():
    s = 0.9
    assert_same_state(channels.squeezing(s)(states.vacuum()), states.squeezed_vacuum(s))


def test_rotation_direction():
    out = channels.rotation(math.pi / 2)(states.coherent(1.0))
    np.testing.assert_allclose(out.means[0], [0, math.sqrt(2)], atol=1e-15)


def test_rotation_preserves_qcs():
    state = states.cat(1.0)
    rotated = channels.rotation(math.pi / 3)(state)
    assert core.qcs_squared(rotated) == pytest.approx(core.qcs_squared(state), rel=1e-10)


def test_displacement_preserves_qcs():
    state = channels.loss(0.8)(states.gkp(0.3))
    shifted = channels.displacement([1.0, 0.0])(state)
    assert core.qcs_squared(shifted) == pytest.approx(core.qcs_squared(state), rel=1e-10)


def test_half_loss_on_squeezed_vacuum():
    for r in (0.2, 1.0, 1.7):
        cov = channels.loss(0.5)(states.squeezed_vacuum(r)).covs[0].real
        assert core.qcs_gaussian(cov) == pytest.approx(1.0, rel=1e-14)


def test_half_loss_on_cat():
    assert core.qcs_squared(channels.loss(0.5)(states.cat(2.0))) == pytest.approx(1.0, abs=1e-9)


def test_heavy_loss_on_gkp_is_classical():
    assert core.qcs_squared(channels.loss(0.3)(states.gkp(0.1))) <= 1 + 1e-4


def amplified(state, eta):
    """Formal continuation of the loss map beyond unit transmissivity."""
    raw = GaussianChannel(math.sqrt(eta) * np.eye(2), (1 - eta) * np.eye(2) / 2, np.zeros(2))
    return raw(state)


@pytest.mark.parametrize("alpha", [1.0, 2.0])
def test_cat_loss_slope_at_unit_transmissivity(alpha):
    h = 1e-5
    state = states.cat(alpha)
    up = core.qcs_squared(amplified(state, 1 + h))
    down = core.qcs_squared(channels.loss(1 - h)(state))
    assert (up - down) / (2 * h) == pytest.approx(cat_decay_slope(alpha), rel=1e-3)


def test_positivity_after_half_loss():
    w_min = oracle.wigner_min(channels.loss(0.5)(states.cat(2.0)))
    assert w_min >= -1e-9


def test_matched_families_initial_decay():
    # at matched initial QCS the squeezed vacuum has the steepest initial decay
    # and GKP stays on top for small loss
    h = 1e-4
    family = {"cat": states.cat(2.8), "gkp": states.gkp(0.05), "squeezed": states.squeezed_vacuum(1.7)}
    slope = {}
    near_one = {}
    for name, state in family.items():
        c0 = core.qcs_squared(state)
        slope[name] = (c0 - core.qcs_squared(channels.loss(1 - h)(state))) / h
        near_one[name] = core.qcs_squared(channels.loss(0.99)(state))
    assert slope["squeezed"] > slope["gkp"] > slope["cat"]
    assert near_one["gkp"] > near_one["cat"] > near_one["squeezed"]
