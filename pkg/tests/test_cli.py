import json
import subprocess
import sys

import numpy as np
import pytest

from amoebakit.cli import UsageError, config_header, main, parse_config


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_valid_config():
    cfg = parse_config(["genus", "--poly", "f0", "--coeffs", "1,1,1,1,5", "--n", "1"])
    assert cfg["n"] == 1 and cfg["res"] == 256 and cfg["coeffs"] == [1, 1, 1, 1, 5]


def test_parse_rejects_bad_level(capsys):
    with pytest.raises(UsageError):
        parse_config(["genus", "--n", "0"])
    assert run(["genus", "--n", "0"], capsys)[0] == 2


def test_flag_overrides_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n": 2, "res": 64}))
    cfg = parse_config(["genus", "--config", str(path), "--n", "4"])
    assert cfg["n"] == 4 and cfg["res"] == 64


def test_unknown_config_key(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"colour": "red"}))
    assert run(["genus", "--config", path], capsys)[0] == 2


def test_missing_subcommand_and_required(capsys):
    assert run([], capsys)[0] == 2
    code, _, err = run(["membership"], capsys)
    assert code == 2 and "--point" in err


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("AMOEBAKIT_THREADS", "3")
    assert parse_config(["genus"])["threads"] == 3
    assert parse_config(["genus", "--threads", "2"])["threads"] == 2


def test_config_header_excludes_threads():
    cfg = parse_config(["genus", "--threads", "2"])
    head = config_header(cfg)
    assert head.startswith("# config: ") and "threads" not in head
    assert json.loads(head[len("# config: "):])["command"] == "genus"


def test_genus_summary(capsys):
    code, out, _ = run(["genus", "--poly", "f0", "--coeffs", "1,1,1,1,5", "--res", 64], capsys)
    assert code == 0 and out.startswith("genus=1 ")


def test_membership_far_point(capsys):
    code, out, _ = run(["membership", "--poly", "f0", "--coeffs", "1,1,1,1,5", "--point", "10,0"], capsys)
    assert code == 0 and out.strip() == "member=false"
    code, out, _ = run(["membership", "--poly", "f0", "--coeffs", "1,1,1,1,5", "--point", "1.5,0"], capsys)
    assert out.strip() == "member=true"


def test_lopsided(capsys):
    code, out, _ = run(["lopsided", "--coeffs", "1,1,1,1,6", "--n", 2, "--point", "0,0"], capsys)
    assert code == 0 and out.splitlines()[0] == "not-member"


def test_missing_input_file(tmp_path, capsys):
    out = tmp_path / "emb.csv"
    code, _, err = run(["project", "--in", tmp_path / "nope.csv", "--out", out], capsys)
    assert code == 3 and err.startswith("error:")
    assert list(tmp_path.iterdir()) == []


def test_bad_pgm_is_io_error(tmp_path, capsys):
    (tmp_path / "img.pgm").write_bytes(b"P2\n1 1\n255\n")
    (tmp_path / "m.csv").write_text("path,label,resolution\nimg.pgm,0,1\n")
    assert run(["eval", "--data", tmp_path / "m.csv"], capsys)[0] == 3


def test_bad_coefficients_are_usage_errors(capsys):
    assert run(["genus", "--coeffs", "1,1,1", "--res", 64], capsys)[0] == 2
    assert run(["transform", "--matrix", "2,2;1,1"], capsys)[0] == 2


def test_generation_failure(tmp_path, capsys):
    # every class quota cannot be met when the margin excludes all rows
    code, _, err = run(
        ["gen-dataset", "--preset", "f0", "--count", 10, "--min-margin", 1e9, "--out", tmp_path / "d.csv"], capsys
    )
    assert code == 5 and "quota" in err


def test_render_deterministic(tmp_path, capsys):
    args = ["render", "--coeffs", "1,1,1,1,6", "--samples", 2000, "--res", 32, "--window", 4]
    assert run(args + ["--out", tmp_path / "a.pgm", "--cloud-out", tmp_path / "a.csv"], capsys)[0] == 0
    assert run(args + ["--out", tmp_path / "b.pgm", "--threads", 1], capsys)[0] == 0
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()
    assert (tmp_path / "a.csv").read_text().startswith("# config: ")


def test_crawl_csv(tmp_path, capsys):
    out = tmp_path / "crawl.csv"
    code, stdout, _ = run(["crawl", "--values", "3,5", "--res", 64, "--window", 5, "--out", out], capsys)
    assert code == 0 and stdout.startswith("genera=0,1")
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# config: ") and lines[1] == "value,genus,degenerate"


def test_transform_via_text_file(tmp_path, capsys):
    poly = tmp_path / "line.txt"
    code, out, _ = run(["transform", "--poly", "l332", "--coeffs", "1,1,1,1,1,1", "--matrix", "1,0;0,1"], capsys)
    assert code == 0 and out.strip().endswith("terms=6")
    poly.write_text(out.rsplit("terms=", 1)[0])
    code, out, _ = run(["transform", "--poly", poly, "--matrix", "2,1;3,2"], capsys)
    assert code == 0


def test_dataset_train_eval_project(tmp_path, capsys):
    data = tmp_path / "f0.csv"
    assert run(["gen-dataset", "--count", 60, "--out", data], capsys)[0] == 0
    text = data.read_text().splitlines()
    assert text[0].startswith("# config: ") and text[1] == "c1,c2,c3,c4,c5,label"
    w = tmp_path / "w.txt"
    assert run(["train", "--data", data, "--epochs", 2, "--hidden", "4", "--weights-out", w], capsys)[0] == 0
    code, out, _ = run(["eval", "--data", data, "--weights", w], capsys)
    assert code == 0 and "heaviside_agreement=1.0000" in out
    code, out, _ = run(["eval", "--data", data, "--k", 2, "--epochs", 1, "--hidden", "4", "--out", tmp_path / "cv.csv"], capsys)
    assert code == 0 and "+-" in out
    emb = tmp_path / "emb.csv"
    assert run(["project", "--method", "mds", "--in", data, "--out", emb], capsys)[0] == 0
    assert emb.read_text().splitlines()[1] == "dim1,dim2,label"


def test_persist(tmp_path, capsys):
    t = np.linspace(0, 2 * np.pi, 30, endpoint=False)
    cloud = tmp_path / "c.csv"
    cloud.write_text("x,y\n" + "\n".join(f"{np.cos(a):.17g},{np.sin(a):.17g}" for a in t) + "\n")
    code, out, _ = run(["persist", "--cloud", cloud, "--out", tmp_path / "d.csv"], capsys)
    assert code == 0 and "h1=1" in out


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "amoebakit.cli", "genus", "--res", "64"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("genus=")
