import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from huygens_relay.errors import CoverageError
from huygens_relay.pattern import (
    BiasGrid,
    Codebook,
    CodebookEntry,
    codebook_to_dict,
    coverage_metrics,
    extract_codebook,
    phase_bin,
    sweep_pattern,
    transmission_phase_span,
)


def test_grid_validation():
    with pytest.raises(ValueError):
        BiasGrid((0.0, 1.0, 1.0), (0.0, 1.0))
    with pytest.raises(ValueError):
        BiasGrid((), (0.0,))
    assert BiasGrid.uniform(0, 20, 11).shape == (11, 11)


def test_pattern_arrays_are_read_only(huygens_pattern):
    with pytest.raises(ValueError):
        huygens_pattern.t_dl[0, 0] = 0


def test_pattern_shape_and_passivity(huygens_pattern):
    p = huygens_pattern
    assert p.t_dl.shape == (201, 201)
    for band in ("dl", "ul"):
        power = np.abs(p.coefficients(band, "transmit")) ** 2 + np.abs(p.coefficients(band, "reflect")) ** 2
        assert power.max() <= 1 + 1e-12


@given(st.floats(-np.pi, np.pi), st.sampled_from([8, 16, 32, 64]))
def test_phase_bin_is_nearest_centre(phi, n):
    b = int(phase_bin(np.exp(1j * phi), n))
    centre = 2 * np.pi * b / n
    err = np.angle(np.exp(1j * (phi - centre)))
    assert abs(err) <= np.pi / n + 1e-12


def test_default_codebook_coverage(dl_codebook):
    m = coverage_metrics(dl_codebook)
    assert m.gap_count == 0 and m.phase_span == 360.0
    assert m.min_amp >= 0.6


def test_codebook_keeps_max_amplitude_per_bin(huygens_pattern, dl_codebook):
    t = huygens_pattern.t_dl.ravel()
    bins = phase_bin(t, 32)
    for e in dl_codebook.entries:
        assert abs(e.coeff_dl) == pytest.approx(np.abs(t[bins == e.bin]).max())


def test_codebook_tie_break_prefers_low_bias():
    grid = BiasGrid((0.0, 1.0), (0.0, 1.0))
    same = np.full((2, 2), 0.9 + 0j)
    from huygens_relay.pattern import HuygensPattern
    p = HuygensPattern(grid, same.copy(), same.copy(), same.copy(), same.copy(), 10.0, 15.0)
    with pytest.raises(CoverageError):
        extract_codebook(p, n_bins=8)
    p2 = HuygensPattern(grid, np.array([[0.9, 0.9], [0.9j, 0.9j]]), same.copy(), same.copy(), same.copy(),
                        10.0, 15.0)
    with pytest.raises(CoverageError):
        extract_codebook(p2, n_bins=8)
    # with most bins filled the tie goes to (u_e, u_m) = (0, 0) for bin 0
    phases = np.exp(2j * np.pi * np.arange(8) / 8)
    g8 = BiasGrid(tuple(float(i) for i in range(8)), (0.0, 1.0))
    t = np.stack([phases, phases], axis=1)
    p3 = HuygensPattern(g8, t, t.copy(), t.copy(), t.copy(), 10.0, 15.0)
    cb = extract_codebook(p3, n_bins=8)
    assert all(e.u_m == 0.0 for e in cb.entries)


def test_min_amplitude_leaves_gaps(huygens_pattern):
    cb = extract_codebook(huygens_pattern, "dl", "transmit", 32, min_amplitude=0.68)
    assert len(cb.gaps) > 0
    assert all(abs(e.coeff_dl) >= 0.68 for e in cb.entries)


def test_sparse_grid_raises_coverage_error(cell):
    p = sweep_pattern(cell, BiasGrid.uniform(9.0, 11.0, 3), 10.0, 15.0)
    with pytest.raises(CoverageError, match="phase bins empty"):
        extract_codebook(p, "dl", "transmit", 32)


def test_joint_codebook_is_two_dimensional(joint_codebook):
    keys = {(e.bin, int(phase_bin(e.coeff_ul, 32))) for e in joint_codebook.entries}
    assert len(keys) == len(joint_codebook.entries)
    assert len({e.bin for e in joint_codebook.entries}) >= 30


def test_phase_span_full_circle(huygens_pattern):
    assert transmission_phase_span(huygens_pattern, "dl") == 360.0


def test_codebook_dict_is_json_ready(dl_codebook):
    import json

    d = codebook_to_dict(dl_codebook)
    assert len(d["entries"]) == 32
    json.dumps(d)


def test_codebook_rejects_empty():
    with pytest.raises(ValueError):
        Codebook("transmit", "dl", 8, ())
    CodebookEntry(0.0, 0.0, 1 + 0j, 1 + 0j, 0)
