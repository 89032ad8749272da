import numpy as np
import pytest

from uapcbf.forecast.dataset import (
    SynthConfig,
    generate_corpus,
    load_checkpoint,
    make_dataset,
    read_trajectory_csv,
    save_checkpoint,
    subsequence_speed_stats,
    synth_recordings,
    write_trajectory_csv,
)
from uapcbf.forecast.network import init_params


def test_speed_statistics_in_band():
    cfg = SynthConfig(n_recordings=40, duration=12.0)
    for seed in (0, 7):
        means, max_speed = subsequence_speed_stats(synth_recordings(cfg, seed))
        assert 0.10 <= means.mean() <= 0.25
        assert max_speed <= cfg.max_speed


def test_recordings_deterministic_under_seed():
    cfg = SynthConfig(n_recordings=5, duration=6.0)
    a = synth_recordings(cfg, seed=3)
    b = synth_recordings(cfg, seed=3)
    for (ta, pa), (tb, pb) in zip(a, b):
        np.testing.assert_array_equal(ta, tb)
        np.testing.assert_array_equal(pa, pb)


def test_corpus_files_identical_across_runs(tmp_path):
    cfg = SynthConfig(n_recordings=3, duration=4.0)
    d1, d2 = tmp_path / "one", tmp_path / "two"
    files1 = generate_corpus(cfg, d1, seed=5)
    files2 = generate_corpus(cfg, d2, seed=5)
    for f1, f2 in zip(files1, files2):
        assert f1.read_bytes() == f2.read_bytes()
    assert (d1 / "manifest.json").read_bytes() == (d2 / "manifest.json").read_bytes()


def test_csv_round_trip(tmp_path):
    cfg = SynthConfig(n_recordings=1, duration=3.0)
    t, pos = synth_recordings(cfg, seed=1)[0]
    path = tmp_path / "rec.csv"
    write_trajectory_csv(path, t, pos)
    t2, pos2 = read_trajectory_csv(path)
    np.testing.assert_array_equal(t, t2)
    np.testing.assert_array_equal(pos, pos2)
    assert path.read_text().splitlines()[0] == "t,x,y,z"


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,x,y,z\n0,0,0,0\n")
    with pytest.raises(ValueError):
        read_trajectory_csv(path)


def test_make_dataset_shapes_and_alignment():
    cfg = SynthConfig(n_recordings=2, duration=4.0)
    recs = synth_recordings(cfg, seed=2)
    pairs = make_dataset(recs, t_in=15, t_out=30, stride=9)
    assert len(pairs) > 0
    for window, truth in pairs:
        assert window.shape == (15, 3)
        assert truth.shape == (30, 3)
    # Window and truth are contiguous slices of the same recording.
    t0, pos0 = recs[0]
    np.testing.assert_array_equal(pairs[0][0], pos0[:15])
    np.testing.assert_array_equal(pairs[0][1], pos0[15:45])


def test_checkpoint_round_trip(tmp_path):
    params = init_params(12, 2, seed=9)
    path = tmp_path / "model.bin"
    save_checkpoint(path, params, meta={"t_in": 15, "dt": 1 / 30})
    loaded, meta = load_checkpoint(path)
    assert meta["t_in"] == 15
    assert loaded.hidden_size == 12 and loaded.num_layers == 2
    for a, b in zip(params.arrays(), loaded.arrays()):
        np.testing.assert_array_equal(a, b)
    with pytest.raises(ValueError):
        bad = tmp_path / "bad.bin"
        bad.write_bytes(b"not a checkpoint")
        load_checkpoint(bad)
