import subprocess
import sys
import warnings

import numpy as np
import pytest

from strcs.cli import cmd_dump_scenario, main
from strcs.config import ConfigError, ExperimentConfig, parse_config, render_config
from strcs.evaluation import realization_rng
from strcs.fields import load_scenario, prm_variances, random_scenario

FAST = "\n".join(
    [
        "sweep = single",
        "snr_db = 20",
        "upa_count = 16",
        "k = 9",
        "grid_size = 20",
        "spacing = 1.0",
        "realizations = 2",
        "starts = 1",
        "maxfev = 50",
    ]
)


def test_empty_config_is_reference_setup():
    cfg = parse_config("")
    assert (cfg.m, cfg.n, cfg.k, cfg.n_t, cfg.n_r) == (256, 256, 16, 3, 3)
    assert (cfg.eta, cfg.grid_size, cfg.side, cfg.spacing) == (1.0, 200, 4.0, 0.2)
    assert (cfg.n_t_hat, cfg.n_r_hat) == (4, 4)
    assert cfg == ExperimentConfig()


def test_snr_list_and_comments():
    cfg = parse_config("# header\nsnr_db = -5,0,5   # three points\n\nSCHEME = rps\n")
    assert cfg.snr_db == (-5.0, 0.0, 5.0)
    assert cfg.scheme == "rps"


def test_upa_count_not_square():
    with pytest.raises(ConfigError):
        parse_config("shape = upa\nupa_count = 15")
    cfg = parse_config("shape = circle\nupa_count = 15")
    assert cfg.m == cfg.n == 15


@pytest.mark.parametrize(
    "text, line",
    [
        ("k = 4\nbogus = 3", 2),
        ("\n\nm = many", 3),
        ("snr_db = 1,x", 1),
        ("just words", 1),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "text",
    [
        "m = 0",
        "realizations = -1",
        "side = 4\nspacing = 0.3",
        "shape = hexagon",
        "scheme = magic",
        "sweep = eta",
        "snr_db = ",
        "eta = 0",
        "method = cobyla",
    ],
)
def test_invalid_values(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_underestimated_paths_warn():
    with pytest.warns(UserWarning):
        parse_config("n_t_hat = 2")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_config("n_t_hat = 3")


@pytest.mark.parametrize(
    "text",
    ["", FAST, "snr_db = -5.5,0,12.25\nseed = 77\nshape = cross\nm = 101\noutput = out dir/x.csv"],
)
def test_render_round_trip(text):
    cfg = parse_config(text)
    assert parse_config(render_config(cfg)) == cfg


def test_sweep_writes_csv(tmp_path, capsys):
    conf = tmp_path / "exp.conf"
    conf.write_text(FAST)
    out = tmp_path / "curve.csv"
    assert main(["sweep", "-c", str(conf), "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "sweep_value,mean_nmse,stderr,n_ok,n_excluded"
    assert lines[1].startswith("20.0,") and lines[1].endswith(",2,0")
    err = capsys.readouterr()
    assert "single=20.0" in err.err
    assert err.out == ""


def test_sweep_rerun_byte_identical(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text(FAST)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "-c", str(conf), "-o", str(a), "--seed", "5"]) == 0
    assert main(["sweep", "-c", str(conf), "-o", str(b), "--seed", "5"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_flags_override_file(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text(FAST + "\nrealizations = 5\n")
    out = tmp_path / "c.csv"
    assert main(["sweep", "-c", str(conf), "-o", str(out), "--realizations", "1",
                 "--set", "snr_db=10"]) == 0
    assert out.read_text().splitlines()[1].startswith("10.0,")
    assert out.read_text().splitlines()[1].endswith(",1,0")


def test_sweep_config_error_exit(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("k = 3\nnope = 1\n")
    assert main(["sweep", "-c", str(conf)]) == 1
    assert "line 2" in capsys.readouterr().err
    assert main(["sweep", "-c", str(tmp_path / "missing.conf")]) == 1


def test_sweep_exclusions_exit_two(tmp_path):
    # K = 2 is below the rank bound, so every realization is excluded
    out = tmp_path / "c.csv"
    assert main(["sweep", "--set", "k=2", "--set", "upa_count=16", "--set", "sweep=single",
                 "--set", "grid_size=10", "--set", "spacing=1", "--realizations", "2",
                 "-o", str(out)]) == 2
    assert out.read_text().splitlines()[1].endswith(",0,2")


def test_dump_scenario_deterministic(capsys):
    assert main(["dump-scenario", "--seed", "3"]) == 0
    first = capsys.readouterr().out
    assert main(["dump-scenario", "--seed", "3"]) == 0
    assert capsys.readouterr().out == first
    sc = load_scenario(first)
    assert sc.n_t == sc.n_r == 3
    # same scenario the sweep sees at index 0
    ref = random_scenario(3, 3, 1.0, realization_rng(3, 0))
    np.testing.assert_array_equal(sc.prm, ref.prm)
    other = load_scenario(cmd_dump_scenario(4))
    assert not np.array_equal(sc.t_angles, other.t_angles)


def test_dumped_prm_statistics():
    prm = np.array([load_scenario(cmd_dump_scenario(s)).prm for s in range(3000)])
    power = np.mean(np.abs(prm) ** 2, axis=0)
    expected = prm_variances(3, 3, 1.0)
    # 3000 exponential draws per entry: relative standard error about 1.8%
    np.testing.assert_allclose(power, expected, rtol=0.08)


def test_dump_scenario_bad_args(capsys):
    assert main(["dump-scenario", "--seed", "-1"]) == 1


def test_dump_trajectory(tmp_path, capsys):
    assert main(["dump-trajectory", "--shape", "circle", "--count", "4", "--side", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "index,x,y"
    assert lines[1] == "0,1.0,0.0"
    assert len(lines) == 5
    out = tmp_path / "t.csv"
    assert main(["dump-trajectory", "--count", "16", "-o", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 17
    assert main(["dump-trajectory", "--count", "15"]) == 1


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "strcs", "dump-trajectory", "--count", "4", "--shape", "cross"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert res.stdout.splitlines()[0] == "index,x,y"
