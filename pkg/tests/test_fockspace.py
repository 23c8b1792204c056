import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosonid import fockspace as fs
from bosonid import photonstats as ps
from bosonid.photonstats import ChannelModel

amplitudes = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


class TestThermalDensity:
    def test_vacuum(self):
        mat = fs.thermal_density(ChannelModel(0.0), 4)
        assert np.allclose(mat.entries, np.diag([1, 0, 0, 0]))
        assert mat.truncation_deficit == 0.0

    def test_geometric_entries(self):
        mat = fs.thermal_density(ChannelModel(1.0), 2)
        assert np.allclose(np.diag(mat.entries).real, [0.5, 0.25])
        assert mat.truncation_deficit == pytest.approx(0.25)

    def test_trace_at_large_cutoff(self):
        mat = fs.thermal_density(ChannelModel(1.0), 60)
        assert np.trace(mat.entries).real >= 1 - 1e-18


class TestDisplacementMatrix:
    def test_zero_displacement_is_identity(self):
        mat = fs.displacement_matrix(0.0, 12)
        assert np.allclose(mat.entries, np.eye(12))

    def test_column_zero_is_coherent_state(self):
        mat = fs.displacement_matrix(1.0, 40)
        expected = fs.coherent_state_vector(1.0, 40)
        assert np.max(np.abs(mat.entries[:, 0] - expected)) < 1e-12

    def test_inverse_product_on_interior_block(self):
        # truncation degrades the rows near the cutoff; the interior block
        # (cutoff minus a spreading margin) is clean
        alpha = 0.7 + 0.2j
        prod = (
            fs.displacement_matrix(alpha, 50).entries
            @ fs.displacement_matrix(-alpha, 50).entries
        )
        block = 30
        assert np.max(np.abs(prod[:block, :block] - np.eye(block))) < 1e-8

    def test_unitarity_within_deficit_margin(self):
        # the row-m spreading width grows like 2|alpha| sqrt(m), so the clean
        # block shrinks with the displacement magnitude
        for alpha, block in ((0.5, 40), (1.0 + 1.0j, 25), (2.0, 20)):
            mat = fs.displacement_matrix(alpha, 60)
            prod = mat.entries @ mat.entries.conj().T
            dev = np.max(np.abs(prod[:block, :block] - np.eye(block)))
            assert dev < max(10 * mat.truncation_deficit, 1e-8)

    def test_rejects_oversized_amplitude(self):
        with pytest.raises(ValueError):
            fs.displacement_matrix(6.0, 20)


class TestDisplacedThermal:
    def test_zero_amplitude_is_thermal(self):
        ch = ChannelModel(1.0)
        a = fs.displaced_thermal_density(0.0, ch, 40)
        b = fs.thermal_density(ch, 40)
        assert np.max(np.abs(a.entries - b.entries)) < 1e-14

    def test_vacuum_noise_gives_coherent_projector(self):
        mat = fs.displaced_thermal_density(1.2, ChannelModel(0.0), 50)
        vec = fs.coherent_state_vector(1.2, 50)
        assert np.max(np.abs(mat.entries - np.outer(vec, vec.conj()))) < 1e-8

    def test_diagonal_matches_pmf(self):
        ch = ChannelModel(0.5)
        mat = fs.displaced_thermal_density(1.0, ch, 60)
        pmf = ps.photon_pmf_array(30, 1.0, ch)
        assert np.max(np.abs(np.diag(mat.entries).real[:31] - pmf)) < 1e-9


class TestOverlap:
    def test_pure_self_overlap(self):
        res = fs.overlap_closed_form([1.0], [1.0], ChannelModel(0.0))
        assert res.exact == 1.0 and res.bound == 1.0

    def test_thermal_self_overlap(self):
        res = fs.overlap_closed_form([0.7], [0.7], ChannelModel(1.0))
        assert res.exact == pytest.approx(0.5)
        assert res.bound == 1.0

    def test_matches_fock_numeric(self):
        ch = ChannelModel(1.0)
        alpha, beta = 0.5, 0.5 + math.sqrt(2)
        rho = fs.displaced_thermal_density(alpha, ch, 60)
        vec = fs.coherent_state_vector(beta, 60)
        numeric = float((vec.conj() @ rho.entries @ vec).real)
        res = fs.overlap_closed_form([alpha], [beta], ch)
        assert res.exact == pytest.approx(0.5 * math.exp(-1))
        assert numeric == pytest.approx(res.exact, abs=1e-8)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            fs.overlap_closed_form([1.0], [1.0, 0.0], ChannelModel(1.0))

    @given(
        st.lists(amplitudes, min_size=1, max_size=4),
        st.floats(0.05, 3.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_exact_below_bound_with_exact_ratio(self, alphas, n_thermal):
        ch = ChannelModel(n_thermal)
        betas = [a + 0.3 for a in alphas]
        res = fs.overlap_closed_form(alphas, betas, ch)
        assert res.exact <= res.bound
        assert res.exact / res.bound == pytest.approx(
            (n_thermal + 1) ** -len(alphas), rel=1e-12
        )


class TestFidelity:
    def test_self_fidelity(self):
        rho = fs.displaced_thermal_density(0.8, ChannelModel(0.5), 60)
        f = fs.fidelity_numeric(rho, rho)
        assert f == pytest.approx(1.0, abs=10 * max(rho.truncation_deficit, 1e-12))

    def test_pure_state_overlap(self):
        vac = np.zeros((40, 40), dtype=complex)
        vac[0, 0] = 1.0
        vec = fs.coherent_state_vector(1.3, 40)
        coh = np.outer(vec, vec.conj())
        assert fs.fidelity_numeric(vac, coh) == pytest.approx(math.exp(-1.69), abs=1e-10)

    def test_displaced_thermal_closed_form(self):
        ch = ChannelModel(0.5)
        f = fs.fidelity_numeric(
            fs.displaced_thermal_density(0.0, ch, 60),
            fs.displaced_thermal_density(1.0, ch, 60),
        )
        assert f == pytest.approx(math.exp(-0.5), abs=1e-4)

    def test_symmetry_and_range(self):
        ch = ChannelModel(1.0)
        r1 = fs.displaced_thermal_density(0.3 + 0.4j, ch, 50)
        r2 = fs.displaced_thermal_density(-0.5, ch, 50)
        f12 = fs.fidelity_numeric(r1, r2)
        f21 = fs.fidelity_numeric(r2, r1)
        assert f12 == pytest.approx(f21, abs=1e-10)
        assert 0 <= f12 <= 1 + 1e-10

    def test_product_structure_two_modes(self):
        # F of a two-mode product equals the product of per-mode fidelities
        ch = ChannelModel(1.0)
        closed = fs.fidelity_displaced_thermal([0.0, 0.0], [1.0, 1.0], ch)
        assert closed == pytest.approx(math.exp(-2 / 3))
        per_mode = fs.fidelity_numeric(
            fs.displaced_thermal_density(0.0, ch, 60),
            fs.displaced_thermal_density(1.0, ch, 60),
        )
        assert per_mode**2 == pytest.approx(closed, abs=1e-4)

    def test_rejects_non_psd(self):
        bad = np.diag([1.0, -0.5]).astype(complex)
        good = np.diag([0.5, 0.5]).astype(complex)
        with pytest.raises(ValueError):
            fs.fidelity_numeric(bad, good)


class TestFuchsVanDeGraaf:
    @pytest.mark.parametrize(
        "alpha,beta,n_thermal",
        [(0.0, 1.2, 1.0), (0.5j, -0.5, 0.3), (1.0, -1.0, 0.7), (0.2 + 0.3j, 1.5, 1.0)],
    )
    def test_chain(self, alpha, beta, n_thermal):
        ch = ChannelModel(n_thermal)
        r1 = fs.displaced_thermal_density(alpha, ch, 60)
        r2 = fs.displaced_thermal_density(beta, ch, 60)
        f = fs.fidelity_numeric(r1, r2)
        t = fs.trace_distance_numeric(r1, r2)
        assert (1 - math.sqrt(f)) ** 2 <= t**2 + 1e-6
        assert t**2 <= 1 - f + 1e-6
