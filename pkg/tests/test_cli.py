import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from laxkit.cli import main as cli_main
from laxkit.cli.config import ConfigError, parse_config_text
from laxkit.cli.rng import SplitMix64

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

RUNS = [
    (["verify", "cybe"], "cybe_yangian.cfg"),
    (["verify", "sklyanin"], "sklyanin_dst.cfg"),
    (["simulate"], "toda_simulate.cfg"),
    (["simulate"], "sg_kink.cfg"),
    (["monodromy"], "nls_monodromy.cfg"),
    (["climit"], "climit.cfg"),
]


def run(args, cfg, out=None, extra=()):
    argv = list(args) + ["--config", str(cfg)] + list(extra)
    if out is not None:
        argv += ["--out", str(out)]
    return cli_main(argv)


# ------------------------------------------------------------------ rng

def test_splitmix64_reference_values():
    # widely published vector for seed 1234567
    g = SplitMix64(1234567)
    assert [g.next_u64() for _ in range(5)] == [
        6457827717110365317, 3203168211198807973, 9817491932198370423,
        4593380528125082431, 16408922859458223821]


def test_splitmix64_uniform_and_split():
    a, b = SplitMix64(42), SplitMix64(42)
    xs = [a.uniform() for _ in range(1000)]
    assert xs == [b.uniform() for _ in range(1000)]
    assert all(0.0 <= x < 1.0 for x in xs)
    c1, c2 = SplitMix64(9).split(), SplitMix64(9).split()
    assert c1.next_u64() == c2.next_u64()
    assert SplitMix64(9).split().state != SplitMix64(10).split().state


@pytest.mark.parametrize("bad", [-1, 2**64])
def test_splitmix64_seed_range(bad):
    with pytest.raises(ValueError):
        SplitMix64(bad)


# ------------------------------------------------------------------ config

def test_config_quotes_case_and_comments():
    cfg = parse_config_text('[climit]\nx = "0.5 + x"  # inline\nX = "1"\n')
    assert cfg.get("climit", "x") == "0.5 + x"
    assert cfg.get("climit", "X") == "1"


@pytest.mark.parametrize("text,msg", [
    ("[bogus]\na = 1\n", "unknown section"),
    ("[model]\na = 1\na = 2\n", "malformed"),
    ("no header\n", "malformed"),
])
def test_config_structure_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config_text(text)


def test_config_typed_errors():
    cfg = parse_config_text('[model]\nsites = four\n[run]\nseed = -3\ndt = 0\nprobes = "1, x"\n')
    with pytest.raises(ConfigError, match="not an integer"):
        cfg.int("model", "sites")
    with pytest.raises(ConfigError, match="unsigned"):
        cfg.seed()
    with pytest.raises(ConfigError, match="positive"):
        cfg.float("run", "dt", positive=True)
    with pytest.raises(ConfigError, match="constant"):
        cfg.complex_list("run", "probes")
    with pytest.raises(ConfigError, match="required"):
        cfg.get("run", "steps", required=True)
    assert cfg.seed(5) == 5


def test_config_hex_seed_and_complex():
    cfg = parse_config_text('[run]\nseed = 0xff\nprobes = "0.5, 1+2*i"\n')
    assert cfg.seed() == 255
    assert cfg.complex_list("run", "probes") == (0.5, 1 + 2j)


# ------------------------------------------------------------------ exit codes

def test_exit_pass(tmp_path, capsys):
    assert run(["verify", "cybe"], CONFIGS / "cybe_yangian.cfg", tmp_path / "o.csv") == 0
    assert "-> PASS" in capsys.readouterr().out


def test_exit_check_failure(tmp_path, capsys):
    assert run(["verify", "cybe"], CONFIGS / "cybe_negative.cfg", tmp_path / "o.csv") == 1
    assert "-> FAIL" in capsys.readouterr().out


def test_exit_config_error(tmp_path, capsys):
    assert run(["charges"], CONFIGS / "bad_config.cfg", tmp_path / "o.csv") == 2
    err = capsys.readouterr().err
    assert err.startswith("laxkit: config error:") and "sites" in err
    assert not (tmp_path / "o.csv").exists()


def test_missing_config_file(tmp_path, capsys):
    assert run(["climit"], tmp_path / "nope.cfg") == 2


def test_bad_expression_is_config_error(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text('[model]\nkind = nls\ngrid = 32\n[init]\npsi = "sech(x"\n[monodromy]\nlam = "0.5"\n')
    assert run(["monodromy"], p) == 2
    assert "byte" in capsys.readouterr().err


def test_verify_without_seed(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("[model]\nr = yangian\n")
    assert run(["verify", "cybe"], p) == 2
    assert run(["verify", "cybe"], p, extra=["--seed", "3"]) == 0


def test_argparse_rejects_bad_seed(capsys):
    with pytest.raises(SystemExit) as exc:
        cli_main(["verify", "cybe", "--config", "x", "--seed", "-1"])
    assert exc.value.code == 2


def test_unknown_check(tmp_path, capsys):
    assert run(["verify", "nonsense"], CONFIGS / "cybe_yangian.cfg", tmp_path / "o") == 2


# ------------------------------------------------------------------ determinism and outputs

@pytest.mark.parametrize("args,name", RUNS, ids=[n for _, n in RUNS])
def test_byte_identical_reruns(tmp_path, capsys, args, name):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(args, CONFIGS / name, a) == 0
    assert run(args, CONFIGS / name, b) == 0
    assert a.read_bytes() == b.read_bytes()
    m = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert set(m) == {"config_sha256", "seed", "version", "started_at", "elapsed_s", "results"}
    assert m["results"]["status"] == "pass"


def test_jobs_do_not_change_output(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["verify", "cybe"], CONFIGS / "cybe_yangian.cfg", a, ["--jobs", "1"])
    run(["verify", "cybe"], CONFIGS / "cybe_yangian.cfg", b, ["--jobs", "4"])
    assert a.read_bytes() == b.read_bytes()


def test_seed_override_changes_samples(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["verify", "cybe"], CONFIGS / "cybe_yangian.cfg", a)
    run(["verify", "cybe"], CONFIGS / "cybe_yangian.cfg", b, ["--seed", "99"])
    assert a.read_bytes() != b.read_bytes()
    assert json.loads((tmp_path / "b.csv.manifest.json").read_text())["seed"] == 99


def test_manifest_hash_matches_file(tmp_path, capsys):
    import hashlib
    cfg = CONFIGS / "toda_simulate.cfg"
    run(["simulate"], cfg, tmp_path / "o.csv")
    m = json.loads((tmp_path / "o.csv.manifest.json").read_text())
    assert m["config_sha256"] == hashlib.sha256(cfg.read_bytes()).hexdigest()
    assert m["results"]["summary"]["drift"]["I2"] < 1e-6


def test_csv_shape(tmp_path, capsys):
    out = tmp_path / "m.csv"
    run(["monodromy"], CONFIGS / "nls_monodromy.cfg", out)
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["lam_re", "lam_im", "trT_re", "trT_im"]
    assert len(rows) == 10
    assert all(float(r[1]) == 0.25 for r in rows[1:])


def test_json_format(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert run(["climit"], CONFIGS / "climit.cfg", out, ["--format", "json"]) == 0
    doc = json.loads(out.read_text())
    assert doc["command"] == "climit"
    assert set(doc["summary"]["orders"]) == {"I1", "I2", "I3"}
    assert doc["summary"]["orders"]["I1"] == "inf" or doc["summary"]["orders"]["I1"] >= 0.95


def test_stdout_mode(capsys):
    assert run(["verify", "cybe"], CONFIGS / "cybe_negative.cfg") == 1
    cap = capsys.readouterr()
    assert cap.out.startswith("sample,residual,within_tolerance\n")
    assert '"config_sha256"' in cap.err and "-> FAIL" in cap.err


# ------------------------------------------------------------------ every check runs from a config

CHECK_CONFIGS = {
    "cybe": "[model]\nr = trig\nn = 3\n",
    "sklyanin": "[model]\nkind = toda-quadratic\nsites = 4\n",
    "linear-bracket": "[model]\nkind = toda-linear\nsites = 4\n",
    "involution": "[model]\nkind = dst\nsites = 3\n",
    "zero-curvature-discrete": "[model]\nkind = dst\nsites = 4\n[verify]\nindex = 2\n",
    "zero-curvature-continuum": "[model]\nkind = sg\ngrid = 64\n[verify]\ntolerance = 1e-8\n",
    "wz": "[model]\nkind = nls\ngrid = 64\n[verify]\ntolerance = 1e-8\n",
    "jacobi": "[model]\nsites = 2\n",
    "cartan": "[model]\nn = 2\n",
}


@pytest.mark.parametrize("check", sorted(CHECK_CONFIGS))
def test_every_check(tmp_path, capsys, check):
    p = tmp_path / "c.cfg"
    p.write_text(CHECK_CONFIGS[check] + "[run]\nseed = 5\n" + ("" if "[verify]" in CHECK_CONFIGS[check]
                                                              else "[verify]\n") + "samples = 4\n")
    assert run(["verify", check], p, tmp_path / "o.csv") == 0, capsys.readouterr()


def test_cartan_rank_out_of_range(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("[model]\nn = 3\n[run]\nseed = 1\n")
    assert run(["verify", "cartan"], p) == 2
    assert "rank" in capsys.readouterr().err


def test_check_model_mismatch(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("[model]\nkind = toda-linear\nsites = 4\n[run]\nseed = 1\n")
    assert run(["verify", "sklyanin"], p) == 2


def test_charges_from_seed(tmp_path, capsys):
    p = tmp_path / "c.cfg"
    p.write_text("[model]\nkind = dst\nsites = 4\n[run]\nseed = 3\n[verify]\nsamples = 3\n")
    assert run(["charges"], p, tmp_path / "o.csv") == 0
    m = json.loads((tmp_path / "o.csv.manifest.json").read_text())
    assert m["results"]["summary"]["max_rel_error"] < 1e-10


def test_console_script_module():
    r = subprocess.run([sys.executable, "-m", "laxkit.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("laxkit ")
