import json
import socket
import subprocess
import sys

import pytest

from qgamble.cli import main
from qgamble.io import read_surface_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_nash_fraction_input(capsys):
    code, out, _ = run(capsys, "nash", "--gamma", "8/9", "--r", "1")
    assert code == 0
    row = json.loads(out)
    assert row["alpha_star"] == pytest.approx(1 / 3, abs=1e-12)
    assert row["beta_star"] == pytest.approx(0.25, abs=1e-12)
    assert row["delta"] == pytest.approx(0.0, abs=1e-12)


def test_nash_from_delta_and_csv(capsys):
    code, out, _ = run(capsys, "nash", "--delta", "0", "--r", "1", "--format", "csv")
    assert code == 0
    header, values = out.splitlines()
    assert header == "gamma,r,alpha_star,beta_star,delta"
    assert float(values.split(",")[0]) == pytest.approx(8 / 9, abs=1e-12)


@pytest.mark.parametrize(
    "argv",
    [
        ["nash", "--gamma", "1.5", "--r", "1"],
        ["nash", "--gamma", "0.5", "--delta", "0", "--r", "1"],
        ["nash", "--gamma", "abc", "--r", "1"],
        ["surface", "--gamma", "0.5", "--r", "1", "--grid", "1"],
        ["simulate", "--gamma", "0.5", "--r", "1", "--alpha", "2", "--beta", "0", "--n", "10"],
        ["protocol", "--gamma", "0.5", "--r", "1", "--rounds", "5", "--bob", "cheater"],
        ["verify", "--configs", "0"],
        ["nash", "--gamma", "0.5", "--r", "1", "--seed", "-1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == 2


def test_surface_to_file_roundtrips(tmp_path, capsys):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "surface", "--gamma", "8/9", "--r", "1", "--grid", "11", "--out", str(path))
    assert code == 0 and out == ""
    rows = read_surface_csv(path.read_text())
    assert len(rows) == 121
    # alpha = 0 leaves box B empty and the verification always matches.
    assert rows[0] == (0.0, 0.0, -1.0)


def test_simulate_is_reproducible(capsys):
    argv = ["simulate", "--gamma", "8/9", "--r", "1", "--alpha", "1/3", "--beta", "1/4", "--n", "10000", "--seed", "5"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    row = json.loads(first)
    assert row["n"] == 10000 and row["seed"] == 5
    assert row["p1_hat"] + row["p2_hat"] + row["p3_hat"] == pytest.approx(1.0)


def test_protocol_liar_nets_r(tmp_path, capsys):
    ledger = tmp_path / "ledger.csv"
    code, out, _ = run(
        capsys, "protocol", "--gamma", "0.5", "--r", "2", "--rounds", "100", "--alice", "fixed:0.3", "--bob", "liar:0.2", "--out", str(ledger)
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["bob_total"] == 200.0 and summary["rounds"] == 100
    assert len(ledger.read_text().splitlines()) == 101


def test_protocol_loopback_matches_in_process(capsys):
    base = ["protocol", "--gamma", "8/9", "--r", "1", "--rounds", "200", "--seed", "9"]
    _, local, _ = run(capsys, *base)
    _, loop, _ = run(capsys, *base, "--loopback")
    assert local == loop


def test_verify_passes_and_printed_model_fails(capsys):
    code, out, _ = run(capsys, "verify", "--configs", "5")
    assert code == 0 and out.strip().endswith("all suites passed")
    code, out, _ = run(capsys, "verify", "--configs", "5", "--gain-model", "printed")
    assert code == 1 and "[FAIL] fair anchor" in out


def test_listen_connect_across_processes(tmp_path):
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    common = ["--gamma", "8/9", "--r", "1", "--rounds", "50", "--seed", "4", "--timeout", "10"]
    host = subprocess.Popen(
        [sys.executable, "-m", "qgamble", "protocol", *common, "--listen", f"127.0.0.1:{port}"],
        stdout=subprocess.PIPE,
        text=True,
    )
    guest = None
    try:
        for _ in range(200):
            guest = subprocess.run(
                [sys.executable, "-m", "qgamble", "protocol", *common, "--connect", f"127.0.0.1:{port}"],
                capture_output=True,
                text=True,
            )
            if guest.returncode != 3:
                break
        host_out, _ = host.communicate(timeout=30)
    finally:
        host.kill()
    assert guest.returncode == 0
    assert json.loads(guest.stdout) == {"role": "bob", "rounds_settled": 50}
    assert json.loads(host_out)["rounds"] == 50


def test_connect_without_listener_exits_3(capsys):
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    code, _, err = run(capsys, "protocol", "--gamma", "0.5", "--r", "1", "--rounds", "1", "--connect", f"127.0.0.1:{port}", "--timeout", "1")
    assert code == 3 and "error" in err
