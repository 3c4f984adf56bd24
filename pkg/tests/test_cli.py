import csv
import json
import random
from pathlib import Path

import pytest

from willvault import cli
from willvault.cli import BenchConfig, ConfigError, generate_workload, run_bench
from willvault.pairing.mock import MockGroup

DATA = Path(__file__).parent / "data"


# ---------------------------------------------------------------------------
# Bench machinery
# ---------------------------------------------------------------------------

def test_bench_config_validation():
    with pytest.raises(ConfigError):
        BenchConfig(atom_counts=[10], repetitions=0)
    with pytest.raises(ConfigError):
        BenchConfig(atom_counts=[10], sharing_factor=0)
    with pytest.raises(ConfigError):
        BenchConfig(atom_counts=[])


def test_workload_deterministic_and_pool_sized_for_largest_run():
    cfg = BenchConfig(atom_counts=[100, 400], sharing_factor=50, seed=9)
    pool1, universe = generate_workload(cfg)
    pool2, _ = generate_workload(cfg)
    assert pool1 == pool2
    assert len(pool1) == 8  # ceil(400 / 50)
    assert len(universe) == 64
    for text in pool1:
        from willvault.policy import parse_policy
        parse_policy(text)


def test_bench_rows_and_counts_on_mock():
    cfg = BenchConfig(atom_counts=[6, 12], sharing_factor=3, repetitions=2,
                      seed=4)
    result = run_bench(cfg, group=MockGroup())
    ops = [(r["scheme"], r["op"], r["atoms"]) for r in result.rows]
    assert ("pdcpabe", "setup", "-") in ops
    assert ("bsw07", "keygen", 30) in ops
    assert ("pdcpabe", "encrypt", 6) in ops
    assert ("bsw07", "decrypt", 12) in ops
    # 2 setup + 8 keygen + 2 atom-counts * 4 op rows
    assert len(result.rows) == 2 + 8 + 8
    # identical policy pool at both sizes means identical structural counts
    assert result.pair_counts[6] == result.pair_counts[12]


def test_bench_csv_golden_header(tmp_path):
    cfg = BenchConfig(atom_counts=[4], sharing_factor=2, repetitions=1, seed=1)
    result = run_bench(cfg, group=MockGroup())
    out = tmp_path / "r.csv"
    result.to_csv(out)
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["scheme", "op", "atoms", "avg_s", "stddev_s", "median_s"]
    assert all(len(r) == 6 for r in rows[1:])


def test_bench_policy_sets_reproducible():
    cfg = BenchConfig(atom_counts=[10], sharing_factor=5, repetitions=1, seed=7)
    r1 = run_bench(cfg, group=MockGroup())
    r2 = run_bench(cfg, group=MockGroup())
    assert r1.policies == r2.policies
    assert r1.pair_counts == r2.pair_counts


def test_bench_pair_counts_equal_at_100_and_400_atoms():
    """Same distinct-policy pool at both sizes, so same structural cost."""
    cfg = BenchConfig(atom_counts=[100, 400], sharing_factor=50,
                      repetitions=1, seed=2)
    result = run_bench(cfg, group=MockGroup())
    assert len(result.policies) == 8
    assert result.pair_counts[100] == result.pair_counts[400]


# ---------------------------------------------------------------------------
# Scenario runner via CLI
# ---------------------------------------------------------------------------

def test_lifecycle_happy_path(tmp_path):
    rc = cli.main(["lifecycle",
                   "--scenario", str(DATA / "scenarios" / "happy_path.json"),
                   "--out-dir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "chain.log").exists()
    assert json.loads((tmp_path / "findings.json").read_text()) == []
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["counts"]["ciphertexts"] == 3
    assert report["counts"]["shares_placed"] == 12
    assert report["counts"]["keys_distributed"] == 2


def test_lifecycle_veto_path(tmp_path):
    rc = cli.main(["lifecycle",
                   "--scenario", str(DATA / "scenarios" / "veto_path.json"),
                   "--out-dir", str(tmp_path)])
    assert rc == 0


def test_lifecycle_vote_after_delete(tmp_path):
    rc = cli.main(["lifecycle",
                   "--scenario", str(DATA / "scenarios" / "vote_after_delete.json"),
                   "--out-dir", str(tmp_path)])
    assert rc == 0


def test_lifecycle_unexpected_failure_reports_nonzero(tmp_path):
    scenario = {
        "will": "../wills/family_estate.xml",
        "kdf": {"n": 16, "salt_hex": "00" * 16},
        "steps": [{"op": "deploy"}, {"op": "execute"}],  # not activated
    }
    path = tmp_path / "bad.json"
    (tmp_path / "s").mkdir()
    spath = DATA / "scenarios" / "_tmp_bad.json"
    spath.write_text(json.dumps(scenario))
    try:
        rc = cli.main(["lifecycle", "--scenario", str(spath),
                       "--out-dir", str(tmp_path / "out")])
        assert rc == 1
    finally:
        spath.unlink()


def test_usage_error_exit_code():
    assert cli.main(["lifecycle"]) == 2
    assert cli.main(["no-such-command"]) == 2


# ---------------------------------------------------------------------------
# Thin commands round trip
# ---------------------------------------------------------------------------

def test_thin_commands_round_trip(tmp_path, capsys):
    params = tmp_path / "params.bin"
    master = tmp_path / "master.bin"
    assert cli.main(["setup", "--out-params", str(params),
                     "--out-master", str(master)]) == 0

    keyfile = tmp_path / "key.bin"
    assert cli.main(["keygen", "--params", str(params), "--master", str(master),
                     "--attrs", "Family,Partner", "--out", str(keyfile)]) == 0

    src = tmp_path / "src"
    src.mkdir()
    (src / "a.txt").write_bytes(b"family letter")
    (src / "b.txt").write_bytes(b"friends only")
    policy_map = tmp_path / "map.json"
    policy_map.write_text(json.dumps({"a.txt": "Family", "b.txt": "Friend"}))
    vault = tmp_path / "vault.bin"
    assert cli.main(["encrypt", "--params", str(params), "--dir", str(src),
                     "--policy-map", str(policy_map), "--out", str(vault)]) == 0

    out = tmp_path / "out"
    assert cli.main(["decrypt", "--params", str(params), "--key", str(keyfile),
                     "--ct", str(vault), "--out-dir", str(out)]) == 0
    assert (out / "a.txt").read_bytes() == b"family letter"
    assert not (out / "b.txt").exists()
    stdout = capsys.readouterr().out
    assert '"a.txt"' in stdout and "denied" in stdout


def test_split_combine_commands(tmp_path):
    source = tmp_path / "payload.bin"
    source.write_bytes(random.Random(3).randbytes(4096))
    shares_dir = tmp_path / "shares"
    assert cli.main(["split", "--file", str(source), "--locations", "5",
                     "--out-dir", str(shares_dir)]) == 0
    share_files = sorted(shares_dir.glob("*.share"))
    assert len(share_files) == 5
    restored = tmp_path / "restored.bin"
    assert cli.main(["combine", "--out", str(restored),
                     str(share_files[0]), str(share_files[2]),
                     str(share_files[4])]) == 0
    assert restored.read_bytes() == source.read_bytes()
    # below threshold fails with exit 1
    assert cli.main(["combine", "--out", str(restored),
                     str(share_files[0]), str(share_files[1])]) == 1


def test_will_validate_command(capsys):
    rc = cli.main(["will-validate", "--file",
                   str(DATA / "wills" / "family_estate.xml")])
    assert rc == 0
    assert "ok: will family-estate-2026" in capsys.readouterr().out


def test_will_validate_rejects_bad(tmp_path):
    bad = tmp_path / "bad.xml"
    bad.write_bytes(b"<nope/>")
    assert cli.main(["will-validate", "--file", str(bad)]) == 1


def test_chain_verify_and_inspect_commands(tmp_path):
    out_dir = tmp_path / "run"
    assert cli.main(["lifecycle",
                     "--scenario", str(DATA / "scenarios" / "happy_path.json"),
                     "--out-dir", str(out_dir)]) == 0
    chain_file = out_dir / "chain.log"
    assert cli.main(["chain-verify", "--file", str(chain_file)]) == 0
    assert cli.main(["inspect", "--chain", str(chain_file), "--will",
                     str(DATA / "wills" / "family_estate.xml")]) == 0
    # tamper and re-verify
    lines = chain_file.read_text().splitlines()
    fields = lines[3].split("\t")
    fields[2] = "mallory"
    lines[3] = "\t".join(fields)
    chain_file.write_text("\n".join(lines) + "\n")
    assert cli.main(["chain-verify", "--file", str(chain_file)]) == 1


def test_golden_will_fixture_parses_unchanged():
    """Committed fixture must keep parsing across versions (portability)."""
    from willvault.willfile import parse_xml, serialize_xml
    blob = (DATA / "wills" / "family_estate.xml").read_bytes()
    will = parse_xml(blob)
    assert will.will_id == "family-estate-2026"
    assert [h.heir_id for h in will.heirs] == ["heir-1", "heir-2"]
    assert len(will.extensions) == 1
    assert b"providerNote" in will.extensions[0]
    assert serialize_xml(will) == blob
