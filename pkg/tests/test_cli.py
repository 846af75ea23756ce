import hashlib
import json
import subprocess
import sys

import pytest

from horopack.cli import EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main

from conftest import run_cli

# sha256 of `render --block 0 --labels` on T_1 with the saturating c1; a
# regression pin, recorded after the figure was checked by eye
M1_BLOCK0_SVG_SHA256 = "4fc289ce959415368cfd87194d99ebb0b10602e8efe62ad390a0ae4bc6c1d2dc"


@pytest.fixture(scope="module")
def m1_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "m1.json"
    code, _, _ = run_cli(["decorate", "--c", "1.0293524442242366", "-o", str(path)])
    assert code == EXIT_OK
    return str(path)


@pytest.fixture(scope="module")
def ico_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "ico.json"
    code, _, _ = run_cli(["construct", "--surface", "icosahedron", "-o", str(path)])
    assert code == EXIT_OK
    return str(path)


def test_construct_to_stdout_and_summary_to_stderr():
    code, out, err = run_cli(["construct", "--m", "2"])
    assert code == EXIT_OK
    assert json.loads(out)["format"] == "horopack-surface"
    assert "triangles 320" in err and "vertices 162" in err


def test_pipe_construct_decorate_verify():
    _, surf, _ = run_cli(["construct", "--m", "1"])
    code, dec, _ = run_cli(["decorate", "--c", "1.1", "-i", "-"], stdin_text=surf)
    assert code == EXIT_OK
    code, out, _ = run_cli(["--json", "verify"], stdin_text=dec)
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["kind"] == "verify" and rep["data"]["ok"] is True


def test_verify_fails_on_non_geometric(tmp_path, ico_file):
    from horopack.decor import uniform_decoration
    from horopack.persist import load_surface, save_surface
    T, _, _ = load_surface(ico_file)
    path = tmp_path / "bad.json"
    save_surface(T, uniform_decoration(T, 1.5), path)
    code, out, _ = run_cli(["verify", "-i", str(path)])
    assert code == EXIT_FAIL


def test_usage_errors():
    assert run_cli(["construct"])[0] == EXIT_USAGE
    assert run_cli(["decorate", "--epsilon", "0.1", "--c", "1"])[0] == EXIT_USAGE
    assert run_cli(["nonsense"])[0] == EXIT_USAGE
    assert run_cli(["slope", "--tau1", "1,0", "--tau2", "0,1", "--pq", "2,4"])[0] != EXIT_OK


def test_io_errors(tmp_path):
    assert run_cli(["verify", "-i", str(tmp_path / "missing.json")])[0] == EXIT_IO
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "horopack-surface"}')
    code, _, err = run_cli(["verify", "-i", str(bad)])
    assert code == EXIT_IO and "$" in err


def test_areas_needs_decoration(ico_file):
    assert run_cli(["areas", "-i", ico_file])[0] == EXIT_USAGE


def test_decorate_epsilon_reaches_target(tmp_path):
    code, out, _ = run_cli(["--json", "decorate", "--epsilon", "0.1", "-o", str(tmp_path / "s.json")])
    assert code == EXIT_OK
    data = json.loads(out)["data"]
    assert data["min_area"] >= 10 / 3 ** 0.5 - 0.1
    assert data["geometric"] is True


def test_slope_and_gate():
    code, out, _ = run_cli(["--json", "slope", "--tau1", "2,-1", "--tau2", "1,2", "--pq", "2,1"])
    assert code == EXIT_OK
    assert abs(json.loads(out)["data"]["length"] - 5.0) < 1e-12
    code, out, _ = run_cli(["--json", "gate", "6.5"])
    assert code == EXIT_OK
    assert json.loads(out)["data"]["verdict"] == "hyperbolic-forced"


def test_obstruct_expect_empty():
    assert run_cli(["obstruct", "--depth", "6", "--expect-empty"])[0] == EXIT_OK
    assert run_cli(["obstruct", "--depth", "2", "--expect-empty"])[0] == EXIT_FAIL


def test_render_checksum(m1_file):
    code, svg, _ = run_cli(["render", "-i", m1_file, "--block", "0", "--labels"])
    assert code == EXIT_OK
    assert hashlib.sha256(svg.encode()).hexdigest() == M1_BLOCK0_SVG_SHA256


def invocations(m1, ico, tmp):
    return {
        "construct": ["construct", "--m", "2"],
        "decorate": ["decorate", "--epsilon", "0.05"],
        "verify": ["verify", "-i", m1],
        "areas": ["areas", "-i", m1, "--per-vertex"],
        "develop": ["develop", "-i", m1],
        "render": ["render", "-i", m1, "--labels", "--dense-packing", "3"],
        "recursion": ["recursion", "--steps", "12"],
        "optimize": ["optimize", "--surface", "icosahedron", "--seed", "5", "--restarts", "2",
                     "--trace", str(tmp / "trace.csv")],
        "slope": ["slope", "--tau1", "2,-1", "--tau2", "1,2", "--pq", "2,1", "--gate"],
        "gate": ["gate", "5.318", "6"],
        "obstruct": ["obstruct", "--depth", "3"],
    }


@pytest.mark.parametrize("json_flag", [False, True])
def test_every_subcommand_is_deterministic(m1_file, ico_file, tmp_path, json_flag):
    runs = {}
    for rep in range(2):
        for name, args in invocations(m1_file, ico_file, tmp_path).items():
            argv = (["--json"] if json_flag else []) + args
            code, out, err = run_cli(argv)
            assert code in (EXIT_OK, EXIT_FAIL), (name, err)
            extra = (tmp_path / "trace.csv").read_bytes() if name == "optimize" else b""
            runs.setdefault(name, []).append((code, out, err, extra))
    for name, (first, second) in runs.items():
        assert first == second, name


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "horopack.cli", "gate", "4"],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_OK
    assert "exceptional" in res.stdout


def test_version():
    assert main(["--version"]) == EXIT_OK
