import json
import os

import numpy as np
import pytest

import stokescontour as sc
from stokescontour.cli import EXIT_CONFIG, EXIT_OK, EXIT_PARTIAL, EXIT_VERIFY, main
from stokescontour.config import (
    ConfigError,
    InitialSpec,
    OutputSpec,
    RunConfig,
    config_from_dict,
    config_to_dict,
    dump_config,
    load_config,
)
from stokescontour.diagnostics import read_diagnostics_csv


def base_config(tmp_path, **overrides):
    kwargs = dict(
        initial=InitialSpec(kind="fourier", fourier_coeffs=[[1, 1e-3]]),
        formulation="graph",
        m=64,
        viscosity=1e-3,
        sign_factor=-1.0,
        integrator=sc.IntegratorParams(t_end=0.05, dt_max=0.02),
        outputs=OutputSpec(
            diagnostics_csv=str(tmp_path / "diag.csv"),
            snapshots_dir=str(tmp_path / "snaps"),
            snapshot_every=2,
        ),
        sample_times=[0.0, 0.025, 0.05],
    )
    kwargs.update(overrides)
    return RunConfig(**kwargs)


# --- presets -----------------------------------------------------------------


def test_preset_f1_values_and_readings():
    m = 1024
    al = sc.uniform_grid(m)
    h = sc.preset_f1(m)
    rising = (al > 0) & (al <= 1.0)
    assert np.array_equal(h[rising], al[rising])  # h = alpha on the first branch
    plateau = (al > 1.0) & (al <= np.pi - 1.0)
    assert np.all(h[plateau] == 1.0)
    descending = (al > np.pi - 1.0) & (al < np.pi)
    assert np.allclose(h[descending], np.pi - al[descending])
    # odd extension
    j = np.arange(m)
    assert np.max(np.abs(h + h[(-j) % m])) <= 1e-15
    # the literally printed third branch jumps instead of descending
    hp = sc.preset_f1(m, reading="printed")
    assert np.allclose(hp[descending], -al[descending] - np.pi)
    assert not np.allclose(h, hp)


def test_preset_f2_values():
    m = 2048
    h = sc.preset_f2(m)
    assert h[3 * m // 4] == 1.0    # alpha = +pi/2
    assert h[m // 4] == -1.0       # alpha = -pi/2
    assert np.max(h) == 1.0 and np.min(h) == -1.0


def test_fourier_initial_single_mode():
    cfg_h = sc.cli.fourier_heights(256, [[1, 0.001]])
    assert np.allclose(cfg_h, 0.001 * np.sin(sc.uniform_grid(256)), atol=1e-18)


def test_malformed_fourier_rejected():
    with pytest.raises(ConfigError):
        InitialSpec(kind="fourier", fourier_coeffs=[[0, 1.0]])
    with pytest.raises(ConfigError):
        InitialSpec(kind="fourier", fourier_coeffs=None)


# --- config serialization ------------------------------------------------------


def test_config_roundtrip(tmp_path):
    cfg = base_config(tmp_path)
    assert config_from_dict(config_to_dict(cfg)) == cfg
    path = tmp_path / "config.json"
    dump_config(cfg, path)
    assert load_config(path) == cfg


def test_config_roundtrip_turning(tmp_path):
    cfg = base_config(
        tmp_path,
        initial=InitialSpec(
            kind="turning_family", turning=sc.TurningFamilyParams(b=4.0)
        ),
        formulation="curve",
        m=256,
        sign_factor=1.0 / (8 * np.pi),
    )
    assert config_from_dict(config_to_dict(cfg)) == cfg


def test_config_validation_errors(tmp_path):
    with pytest.raises(ConfigError):
        base_config(tmp_path, formulation="spectral")
    with pytest.raises(ConfigError):
        base_config(tmp_path, sample_times=None)  # neither times nor dt
    with pytest.raises(ConfigError):
        base_config(
            tmp_path,
            initial=InitialSpec(kind="turning_family", turning=sc.TurningFamilyParams(b=2.0)),
        )  # turning family needs the curve formulation
    with pytest.raises(ConfigError):
        config_from_dict({"schema_version": 99})


# --- run -----------------------------------------------------------------------


def test_run_flat_initial(tmp_path):
    cfg = base_config(tmp_path, initial=InitialSpec(kind="fourier", fourier_coeffs=[[1, 0.0]]))
    assert sc.run(cfg) == EXIT_OK
    data = read_diagnostics_csv(cfg.outputs.diagnostics_csv)
    assert np.all(data["E"] == 0.0)
    assert data["t"].tolist() == [0.0, 0.025, 0.05]
    # snapshots written every other sample
    snaps = sorted(os.listdir(cfg.outputs.snapshots_dir))
    assert snaps == ["snapshot_00000.csv", "snapshot_00002.csv"]


def test_run_deterministic_outputs(tmp_path):
    cfg1 = base_config(tmp_path, outputs=OutputSpec(diagnostics_csv=str(tmp_path / "a.csv")))
    cfg2 = base_config(tmp_path, outputs=OutputSpec(diagnostics_csv=str(tmp_path / "b.csv")))
    assert sc.run(cfg1) == EXIT_OK
    assert sc.run(cfg2) == EXIT_OK
    assert open(tmp_path / "a.csv", "rb").read() == open(tmp_path / "b.csv", "rb").read()


def test_run_partial_writes_valid_csv_and_failure_record(tmp_path):
    cfg = base_config(
        tmp_path,
        initial=InitialSpec(kind="fourier", fourier_coeffs=[[1, 0.5]]),
        integrator=sc.IntegratorParams(
            t_end=1.0, rel_tol=1e-12, abs_tol=1e-12, dt_init=0.5, dt_min=0.5, dt_max=0.5
        ),
        sample_times=[0.0, 0.5, 1.0],
    )
    assert sc.run(cfg) == EXIT_PARTIAL
    data = read_diagnostics_csv(cfg.outputs.diagnostics_csv)  # no torn rows
    assert data["t"].size == 1
    failure = json.load(open(cfg.outputs.diagnostics_csv + ".failure.json"))
    assert "failure_time" in failure and failure["samples_written"] == 1


def test_run_from_snapshot_file(tmp_path):
    snap = tmp_path / "init.csv"
    sc.write_snapshot(snap, sc.GraphInterface(h=sc.preset_f2(64)))
    cfg = base_config(tmp_path, initial=InitialSpec(kind="snapshot_file", path=str(snap)))
    assert sc.run(cfg) == EXIT_OK


def test_run_snapshot_grid_mismatch_is_config_error(tmp_path):
    snap = tmp_path / "init.csv"
    sc.write_snapshot(snap, sc.GraphInterface(h=sc.preset_f2(128)))
    cfg = base_config(tmp_path, initial=InitialSpec(kind="snapshot_file", path=str(snap)))
    assert sc.run(cfg) == EXIT_CONFIG


def test_run_curve_formulation(tmp_path):
    cfg = base_config(
        tmp_path,
        initial=InitialSpec(kind="turning_family", turning=sc.TurningFamilyParams(b=2.0)),
        formulation="curve",
        m=128,
        sign_factor=1.0 / (8 * np.pi),
        integrator=sc.IntegratorParams(t_end=0.02, dt_max=0.01),
        sample_times=[0.0, 0.02],
    )
    assert sc.run(cfg) == EXIT_OK
    data = read_diagnostics_csv(cfg.outputs.diagnostics_csv)
    assert np.all(np.isnan(data["delta"]))  # delta is a graph-only monitor


# --- verify ----------------------------------------------------------------------


def test_verify_passes_on_good_run(tmp_path):
    cfg = base_config(tmp_path)
    assert sc.run(cfg) == EXIT_OK
    code, report = sc.verify(cfg)
    assert code == EXIT_OK
    assert report["energy_monotone"]["pass"]
    assert report["central_symmetry"]["pass"]
    assert report["perimeter_lower_bound"]["pass"]


def test_verify_detects_corrupted_energy(tmp_path):
    cfg = base_config(tmp_path)
    assert sc.run(cfg) == EXIT_OK
    # negate the E column
    lines = open(cfg.outputs.diagnostics_csv).read().splitlines()
    header = lines[0].split(",")
    iE = header.index("E")
    out = [lines[0]]
    for line in lines[1:]:
        parts = line.split(",")
        parts[iE] = repr(-float(parts[iE]) - 1e-3)
        out.append(",".join(parts))
    open(cfg.outputs.diagnostics_csv, "w").write("\n".join(out) + "\n")
    code, report = sc.verify(cfg)
    assert code == EXIT_VERIFY
    assert not report["energy_monotone"]["pass"]


# --- command line ------------------------------------------------------------------


def test_main_run_and_verify(tmp_path):
    cfg = base_config(tmp_path)
    path = tmp_path / "cfg.json"
    dump_config(cfg, path)
    assert main(["run", str(path)]) == EXIT_OK
    assert main(["verify", str(path)]) == EXIT_OK


def test_main_bad_config_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\"schema_version\": 1}")
    assert main(["run", str(path)]) == EXIT_CONFIG


def test_main_preset_dump(tmp_path):
    out = tmp_path / "f2.csv"
    assert main(["preset-dump", "f2", "--m", "64", "--out", str(out)]) == EXIT_OK
    obj = sc.read_snapshot(out)
    assert isinstance(obj, sc.GraphInterface)
    assert obj.m == 64


def test_run_unwritable_output_is_config_error(tmp_path):
    cfg = base_config(
        tmp_path,
        outputs=OutputSpec(diagnostics_csv=str(tmp_path / "no" / "such" / "dir" / "d.csv")),
    )
    assert sc.run(cfg) == EXIT_CONFIG
