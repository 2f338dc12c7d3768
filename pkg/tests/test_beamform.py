import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from huygens_relay.beamform import (
    Beam,
    BeamSpec,
    SurfaceConfig,
    SurfaceGeometry,
    array_factor,
    cross_band_ghost,
    efficiency,
    main_lobe,
    progressive_phase,
    radiation_pattern,
    split_config,
    steering_config,
    wavenumber,
)
from huygens_relay.pattern import Codebook, CodebookEntry


def ideal_codebook(n_bins=32, amp=1.0):
    entries = tuple(
        CodebookEntry(float(k), 0.0, amp * np.exp(2j * np.pi * k / n_bins), amp * np.exp(2j * np.pi * k / n_bins), k)
        for k in range(n_bins)
    )
    return Codebook("transmit", "dl", n_bins, entries)


def uniform_config(geom, f=10.0):
    ones = np.ones(geom.n, dtype=complex)
    z = np.zeros(geom.n)
    return SurfaceConfig(z, z.copy(), ones, ones.copy(), "transmit", geom, f, 15.0)


def test_af_broadside_coherent_sum():
    g = SurfaceGeometry(n=8)
    assert array_factor(np.ones(8), g, 10.0, 0.0) == pytest.approx(8)


def test_af_cancellation():
    assert abs(array_factor([1, -1], SurfaceGeometry(n=2), 10.0, 0.0)) < 1e-12


def test_af_phase_conjugate_steering():
    g = SurfaceGeometry(n=16)
    a = np.exp(1j * progressive_phase(g, 10.0, 30.0))
    assert abs(array_factor(a, g, 10.0, 30.0)) == pytest.approx(16)


@settings(max_examples=60)
@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False), min_size=1,
                max_size=6),
       st.floats(-89, 89), st.floats(1, 30))
def test_af_matches_oracle_and_bound(w, theta, f):
    g = SurfaceGeometry(n=len(w), d=7.5)
    af = array_factor(w, g, f, theta)
    assert af == pytest.approx(oracles.array_factor(w, 7.5, f, theta), abs=1e-9)
    assert abs(af) <= sum(abs(x) for x in w) + 1e-9


@given(st.floats(0, 2 * np.pi), st.floats(-80, 80))
def test_global_phase_invariance(dl_codebook, phi, theta):
    g = SurfaceGeometry(n=16)
    a = dl_codebook.coeffs("dl")[:16]
    assert abs(array_factor(a * np.exp(1j * phi), g, 10.0, theta)) == pytest.approx(
        abs(array_factor(a, g, 10.0, theta)), rel=1e-9, abs=1e-9)


def test_af_dimension_error():
    with pytest.raises(ValueError):
        array_factor([1, 2, 3], SurfaceGeometry(n=4), 10.0, 0.0)
    with pytest.raises(ValueError):
        wavenumber(0.0)


def test_geometry_validation():
    with pytest.raises(ValueError):
        SurfaceGeometry(n=0)
    with pytest.raises(ValueError):
        SurfaceGeometry(d=0)
    assert SurfaceGeometry().aperture_area == pytest.approx(0.64 * 0.64)


def test_beamspec_validation():
    with pytest.raises(ValueError):
        BeamSpec((Beam(10, 0.6), Beam(-10, 0.6)))
    with pytest.raises(ValueError):
        BeamSpec((Beam(95, 1.0),))
    with pytest.raises(ValueError):
        BeamSpec((Beam(0, 1.0),), band_policy="both")
    assert BeamSpec(((10.0, 1.0),)).beams[0] == Beam(10.0, 1.0)


def test_uniform_pattern_nulls():
    g = SurfaceGeometry(n=16)
    rp = radiation_pattern(uniform_config(g), 10.0, np.arange(-90, 90.01, 0.01))
    assert rp.theta[np.argmax(rp.mag)] == pytest.approx(0.0, abs=0.01)
    lam = 299.792458 / 10.0
    null = np.degrees(np.arcsin(lam / (16 * 10.0)))
    near = np.abs(rp.theta - null) < 0.05
    assert rp.mag[near].min() < 1e-3


def test_efficiency_equals_pattern_value(dl_codebook, geometry):
    cfg = steering_config(dl_codebook, geometry, 20.0, "dl_only")
    rp = radiation_pattern(cfg, "dl", [20.0])
    assert efficiency(cfg, "dl", 20.0) == rp.mag[0]
    with pytest.raises(ValueError):
        radiation_pattern(cfg, "dl", [])


def test_broadside_ideal_codebook_uses_one_entry(geometry):
    cfg = steering_config(ideal_codebook(amp=0.9), geometry, 0.0, "dl_only")
    assert len(set(zip(cfg.u_e, cfg.u_m))) == 1
    assert efficiency(cfg, "dl", 0.0) == pytest.approx(0.9)


@settings(max_examples=25, deadline=None)
@given(st.floats(-75, 75), st.sampled_from([8, 16, 32]))
def test_ideal_codebook_quantization_bound(theta, n_bins):
    g = SurfaceGeometry(n=32)
    cfg = steering_config(ideal_codebook(n_bins), g, theta, "dl_only", refine=False)
    assert efficiency(cfg, "dl", theta) >= np.cos(np.pi / n_bins) - 1e-9


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("theta", [-50.0, -10.0, 25.0, 70.0])
def test_brute_force_oracle_small_arrays(n, theta):
    cb = ideal_codebook(8)
    coeffs = list(cb.coeffs("dl"))
    best, _ = oracles.best_assignment(coeffs, n, 10.0, 10.0, theta)
    g = SurfaceGeometry(n=n)
    plain = abs(array_factor(steering_config(cb, g, theta, "dl_only", refine=False).coeff_dl, g, 10.0, theta))
    refined = abs(array_factor(steering_config(cb, g, theta, "dl_only").coeff_dl, g, 10.0, theta))
    assert plain >= np.cos(np.pi / 8) * best - 1e-9
    assert plain - 1e-9 <= refined <= best + 1e-9


def test_default_broadside_efficiency(dl_codebook, geometry):
    assert efficiency(steering_config(dl_codebook, geometry, 0.0, "dl_only"), "dl", 0.0) >= 0.85


def test_steered_main_lobe_dl(dl_codebook, geometry):
    cfg = steering_config(dl_codebook, geometry, 30.0, "dl_only")
    assert main_lobe(cfg, "dl") == pytest.approx(30.0, abs=0.5)


def test_joint_policy_45_degrees(joint_codebook, geometry):
    cfg = steering_config(joint_codebook, geometry, 45.0, "joint")
    assert abs(main_lobe(cfg, "dl") - 45.0) <= 2.0
    assert abs(main_lobe(cfg, "ul") - 45.0) <= 2.0


def test_cross_band_ghost_direction():
    assert cross_band_ghost(30.0, 15.0, 10.0) == pytest.approx(np.degrees(np.arcsin(0.75)))
    assert cross_band_ghost(60.0, 15.0, 10.0) is None


def test_config_rejects_wrong_length(geometry):
    with pytest.raises(ValueError):
        SurfaceConfig(np.zeros(3), np.zeros(3), np.ones(3), np.ones(3), "transmit", geometry, 10, 15)


def test_config_to_dict(dl_codebook, geometry):
    d = steering_config(dl_codebook, geometry, 10.0, "dl_only").to_dict()
    assert len(d["elements"]) == geometry.n and d["metadata"]["theta_target"] == 10.0


def test_single_beam_split_matches_steering(dl_codebook, geometry):
    s = split_config(dl_codebook, geometry, BeamSpec((Beam(20.0, 1.0),), "dl_only"))
    c = steering_config(dl_codebook, geometry, 20.0, "dl_only")
    assert np.array_equal(s.coeff_dl, c.coeff_dl)


def test_close_beams_warn(dl_codebook, geometry):
    s = split_config(dl_codebook, geometry, BeamSpec((Beam(10.0, 0.5), Beam(12.0, 0.5)), "dl_only"))
    assert s.metadata["warnings"]


def test_split_pm60_two_dominant_peaks(dl_codebook, geometry):
    s = split_config(dl_codebook, geometry, BeamSpec((Beam(-60.0, 0.5), Beam(60.0, 0.5)), "dl_only"))
    rp = radiation_pattern(s, "dl", np.arange(-90, 90.01, 0.1))
    m = rp.mag
    peaks = [i for i in range(1, m.size - 1) if m[i] >= m[i - 1] and m[i] > m[i + 1]]
    top = sorted(peaks, key=lambda i: -m[i])[:2]
    assert sorted(round(float(rp.theta[i])) for i in top) == [-60, 60]


def test_split_lobe_fractions_bounded(dl_codebook, geometry):
    spec = BeamSpec((Beam(-30.0, 0.3), Beam(40.0, 0.7)), "dl_only")
    s = split_config(dl_codebook, geometry, spec)
    assert sum(efficiency(s, "dl", b.theta) ** 2 for b in spec.beams) <= 1.0


def test_unrefined_split_uses_complex_distance(dl_codebook, geometry):
    spec = BeamSpec((Beam(-45.0, 0.5), Beam(45.0, 0.5)), "dl_only")
    s = split_config(dl_codebook, geometry, spec, refine=False)
    c = dl_codebook.coeffs("dl")
    n = np.arange(geometry.n)
    k = wavenumber(10.0) * geometry.d * np.sin(np.radians(45.0))
    tgt = np.sqrt(0.5) * (np.exp(1j * k * n) + np.exp(-1j * k * n))
    tgt /= np.abs(tgt).max()
    expect = c[np.argmin(np.abs(c[None, :] - tgt[:, None]), axis=1)]
    assert np.allclose(s.coeff_dl, expect)
