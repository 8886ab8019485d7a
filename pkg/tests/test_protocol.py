"""Teleportation protocol simulation and incomplete-set bounds."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entdist.measures import fef
from entdist.protocol import (
    CompletionStates,
    default_completion,
    incomplete_bounds,
    protocol_success,
    sample_protocol_success,
    simulate_protocol,
    teleport_residuals,
)
from entdist.states import (
    ResourceSpectrum,
    conjugated_basis,
    haar_random_unitary,
    max_ent_state,
    random_spectrum,
    weyl_basis,
)

BELL_SPEC = ResourceSpectrum.from_probabilities([0.8, 0.2])


class TestResiduals:
    def test_gram_formula_example(self):
        """Against the clock generator the overlap is a1^2 - a2^2."""
        res = teleport_residuals(weyl_basis(2), BELL_SPEC)
        assert res.gram[0, 1] == pytest.approx(0.8 - 0.2, abs=1e-12)

    def test_max_entangled_gram_is_identity(self):
        for d in (2, 3):
            res = teleport_residuals(weyl_basis(d), ResourceSpectrum.uniform(d))
            assert np.allclose(res.gram, np.eye(d * d), atol=1e-12)

    def test_product_resource_residuals(self):
        """One Schmidt term survives: gamma_i = |0> (x) U_i|0>."""
        d = 3
        basis = weyl_basis(d)
        res = teleport_residuals(basis, ResourceSpectrum.product(d))
        for gamma, u in zip(res.gammas, basis.unitaries):
            expect = np.zeros(d * d, dtype=complex)
            expect[:d] = u[:, 0]
            assert np.allclose(gamma, expect, atol=1e-12)

    def test_truncated_set(self):
        res = teleport_residuals(weyl_basis(2), BELL_SPEC, 3)
        assert len(res) == 3
        assert res.gram.shape == (3, 3)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 3))
    def test_gram_cross_check_holds_on_random_bases(self, seed, d):
        rng = np.random.default_rng(seed)
        basis = conjugated_basis(weyl_basis(d), haar_random_unitary(d, rng))
        spec = random_spectrum(d, rng)
        res = teleport_residuals(basis, spec)  # raises if the check fails
        assert np.max(np.abs(np.diag(res.gram) - 1.0)) < 1e-12


class TestProtocol:
    def test_benchmark_value(self):
        assert protocol_success(weyl_basis(2), BELL_SPEC) == pytest.approx(
            0.9, abs=1e-12
        )

    def test_per_term_equality(self):
        run = simulate_protocol(weyl_basis(2), BELL_SPEC)
        assert run.max_term_deviation < 1e-12
        for term in run.per_state:
            assert term == pytest.approx(0.9, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3])
    def test_endpoints(self, d):
        assert protocol_success(weyl_basis(d), ResourceSpectrum.uniform(d)) == (
            pytest.approx(1.0, abs=1e-10)
        )
        assert protocol_success(weyl_basis(d), ResourceSpectrum.product(d)) == (
            pytest.approx(1.0 / d, abs=1e-10)
        )

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 3))
    def test_success_equals_fef(self, seed, d):
        rng = np.random.default_rng(seed)
        spec = random_spectrum(d, rng)
        basis = conjugated_basis(weyl_basis(d), haar_random_unitary(d, rng))
        run = simulate_protocol(basis, spec)
        assert abs(run.value - fef(spec)) < 1e-10
        assert run.max_term_deviation < 1e-10

    def test_sampling_converges(self):
        estimate = sample_protocol_success(
            weyl_basis(2), BELL_SPEC, 100_000, np.random.default_rng(20)
        )
        assert abs(estimate - 0.9) < 1e-2

    def test_sampling_is_seeded(self):
        args = (weyl_basis(2), BELL_SPEC, 1000)
        a = sample_protocol_success(*args, np.random.default_rng(5))
        b = sample_protocol_success(*args, np.random.default_rng(5))
        assert a == b

    def test_sampling_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_protocol_success(
                weyl_basis(2), BELL_SPEC, 0, np.random.default_rng(0)
            )


class TestCompletion:
    def test_default_completion_counts(self):
        basis = weyl_basis(3)
        comp = default_completion(basis, 5)
        assert len(comp) == 4

    def test_default_completion_is_orthogonal_to_measured_set(self):
        basis = weyl_basis(2)
        comp = default_completion(basis, 3)
        measured = basis.kets()[:3]
        for v in comp.kets:
            for psi in measured:
                assert abs(np.vdot(v, psi)) < 1e-12

    def test_errors_on_full_basis(self):
        with pytest.raises(ValueError):
            default_completion(weyl_basis(2), 4)

    def test_completion_states_validate(self):
        v = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        with pytest.raises(ValueError):
            CompletionStates(kets=(v, v))
        with pytest.raises(ValueError):
            CompletionStates(kets=(2.0 * v,))


class TestIncompleteBounds:
    def test_three_state_benchmark(self):
        """lower = F + (1/3)(a1 - a2)^2/2 = (2/3)(1 + a1 a2)."""
        bounds = incomplete_bounds(weyl_basis(2), BELL_SPEC, 3)
        assert bounds.lower == pytest.approx(2.0 / 3.0 * 1.4, abs=1e-10)
        assert bounds.upper == pytest.approx(1.0)
        assert bounds.assignments == (2,)
        assert bounds.overlaps[0] == pytest.approx(0.1, abs=1e-12)
        assert bounds.in_range

    def test_projector_strategy_matches_at_single_completion(self):
        completion = incomplete_bounds(weyl_basis(2), BELL_SPEC, 3)
        projector = incomplete_bounds(
            weyl_basis(2), BELL_SPEC, 3, strategy="projector"
        )
        assert projector.lower == pytest.approx(completion.lower, abs=1e-12)

    def test_completion_strategy_dominates_projector(self):
        """Per-direction maxima beat one shared maximum."""
        rng = np.random.default_rng(77)
        for _ in range(5):
            spec = random_spectrum(3, rng)
            for n in (4, 6, 8):
                a = incomplete_bounds(weyl_basis(3), spec, n)
                b = incomplete_bounds(weyl_basis(3), spec, n, strategy="projector")
                assert a.lower >= b.lower - 1e-12

    def test_full_set_collapses_to_fef(self):
        bounds = incomplete_bounds(weyl_basis(2), BELL_SPEC, 4)
        assert bounds.lower == pytest.approx(0.9, abs=1e-12)
        assert bounds.upper == pytest.approx(0.9, abs=1e-12)

    def test_maximally_entangled_resource_reaches_one(self):
        bounds = incomplete_bounds(weyl_basis(2), ResourceSpectrum.uniform(2), 3)
        assert bounds.lower == pytest.approx(1.0, abs=1e-10)
        assert bounds.upper == pytest.approx(1.0)

    def test_below_regime_sets_flag(self):
        bounds = incomplete_bounds(weyl_basis(3), ResourceSpectrum.uniform(3), 2)
        assert not bounds.in_range

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), d=st.integers(2, 3))
    def test_ordering_invariants(self, seed, d):
        rng = np.random.default_rng(seed)
        spec = random_spectrum(d, rng)
        basis = weyl_basis(d)
        for n in range(d + 1, d * d + 1):
            bounds = incomplete_bounds(basis, spec, n)
            assert fef(spec) - 1e-12 <= bounds.lower
            assert bounds.lower <= bounds.upper + 1e-12
            assert bounds.upper <= 1.0 + 1e-12

    def test_iterates_as_pair(self):
        lower, upper = incomplete_bounds(weyl_basis(2), BELL_SPEC, 3)
        assert lower == pytest.approx(2.0 / 3.0 * 1.4, abs=1e-10)
        assert upper == pytest.approx(1.0)

    def test_custom_completion_must_match_count(self):
        comp = default_completion(weyl_basis(2), 3)
        with pytest.raises(ValueError):
            incomplete_bounds(weyl_basis(2), BELL_SPEC, 2, completion=comp)

    def test_overlapping_completion_rejected(self):
        bad = CompletionStates(kets=(max_ent_state(np.eye(2)),))
        with pytest.raises(ValueError):
            incomplete_bounds(weyl_basis(2), BELL_SPEC, 3, completion=bad)


def test_tie_break_picks_lowest_index():
    """A maximally entangled resource ties every overlap at zero."""
    bounds = incomplete_bounds(weyl_basis(3), ResourceSpectrum.uniform(3), 6)
    assert bounds.assignments == (0, 0, 0)
