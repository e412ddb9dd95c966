import subprocess
import sys

import pytest

from brjunolab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text):
    return [l for l in text.splitlines() if not l.startswith("#")]


def test_expand(capsys):
    code, out, _ = run(capsys, "expand", "golden", "--depth", "5")
    assert code == 0
    rows = body(out)
    assert rows[0].startswith("n,v_n,P,Q,growth_bound,gap_bounds")
    assert [r.split(",")[2:4] for r in rows[1:4]] == [["1", "1"], ["2", "1"], ["3", "2"]]


def test_classify_golden(capsys):
    code, out, _ = run(capsys, "classify", "golden", "--depth", "30")
    assert code == 0
    assert "classification=CONVERGENT-TREND" in out


def test_classify_liouville_certificate(capsys):
    code, out, _ = run(capsys, "classify", "liouville:1,1", "--depth", "8")
    assert code == 0
    assert "CERTIFIED-DIVERGENT" in out and "certificate=" in out


def test_classify_br_alpha_note(capsys):
    code, out, _ = run(capsys, "classify", "sqrt2", "--br-alpha", "1", "--qmax", "50", "--depth", "10")
    assert code == 0 and "sigma=2*alpha/(alpha+1)=1.0" in out


def test_potential(capsys, tmp_path):
    svg = tmp_path / "scan.svg"
    code, out, _ = run(capsys, "potential", "sqrt2", "--schedule", "10,20,40", "--svg", str(svg))
    assert code == 0
    rows = body(out)
    assert rows[0] == "Qmax,U_lo,U_hi,lower_bound,sigma,sigma_stated,U_stated_lo,U_stated_hi"
    assert len(rows) == 4 and svg.read_text().startswith("<svg")


def test_capacity(capsys):
    code, out, _ = run(capsys, "capacity", "intervals:0,1/4", "--grid", "40,80")
    assert code == 0
    rows = body(out)
    assert rows[0].startswith("resolution,W,C,gap,iters,points,status")
    assert all(r.endswith("CONVERGED") for r in rows[1:])


def test_hausdorff(capsys):
    code, out, _ = run(capsys, "hausdorff", "points:1/2", "--schedule", "1/100,1/1000")
    assert code == 0 and body(out)[0] == "eps,bound,balls_used"


@pytest.mark.parametrize("argv", [
    ["expand", "quad:1,4,2"],
    ["expand", "pi"],
    ["capacity", "intervals:1,0"],
    ["hausdorff", "cantor:ratio=1/3"],
    ["hausdorff", "points:0", "--gauge", "box:1"],
    ["hausdorff", "cantor:depth=3", "--scan", "true"],
    ["classify", "golden", "--beta", "abc"],
    ["expand"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_argparse_error_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["expand", "golden", "--nope"])
    assert exc.value.code == 2


def test_unknown_config_key(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("number=golden\nsigma=2\n")
    assert run(capsys, "expand", "--config", str(cfg))[0] == 2


@pytest.mark.parametrize("argv", [
    ["expand", "e", "--depth", "12"],
    ["classify", "sqrt3", "--depth", "20", "--beta", "2"],
    ["potential", "golden", "--schedule", "10,30", "--kernel", "K2"],
    ["hausdorff", "cantor:depth=4", "--gauge", "power:0.6309", "--schedule", "1/9,1/27"],
    ["hausdorff", "points:0,1/10,1/3", "--schedule", "1/5,1/50", "--scan", "true"],
    ["capacity", "intervals:0,1/8;1/4,3/8", "--grid", "32", "--rule", "nearest"],
])
def test_header_roundtrip_and_determinism(capsys, tmp_path, argv):
    code, first, _ = run(capsys, *argv)
    assert code == 0
    cfg = tmp_path / "run.cfg"
    cfg.write_text("".join(l[2:] + "\n" for l in first.splitlines() if l.startswith("# ") and "=" in l))
    code2, second, _ = run(capsys, argv[0], "--config", str(cfg))
    assert code2 == 0 and second == first
    assert run(capsys, *argv)[1] == first


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# comment\nnumber=golden\ndepth=3\n")
    _, out, _ = run(capsys, "expand", "--config", str(cfg), "--depth", "4")
    assert "# depth=4" in out and len(body(out)) == 6


def test_out_file(capsys, tmp_path):
    dest = tmp_path / "o.csv"
    code, out, _ = run(capsys, "expand", "sqrt2", "--depth", "3", "--out", str(dest))
    assert code == 0 and out == "" and dest.read_text().startswith("# command=expand")


def test_verify_subprocess():
    proc = subprocess.run([sys.executable, "-m", "brjunolab", "verify"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert proc.stdout.count(",PASS,") == 7
