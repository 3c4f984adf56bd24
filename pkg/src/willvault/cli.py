"""Command-line surface: benchmarks, scripted lifecycles, and thin wrappers.

``bench`` reproduces the scaling experiment (one multi-payload ciphertext
versus per-message baseline encryptions over the same policy workload);
``lifecycle`` drives a broker from a declarative scenario file.  The rest
are one-call wrappers over the library modules.

Exit codes: 0 success, 1 assertion/verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from willvault import bsw07, pdcpabe, policy, sharding, willfile
from willvault import ledger as ledger_mod
from willvault.adapters import builtin_adapter
from willvault.broker import (
    Broker,
    SimClock,
    generate_authority_keys,
    sign_override,
)
from willvault.keyvault import KdfConfig, derive_keypair
from willvault.pairing import BACKEND_NAME
from willvault.pairing.group import default_group
from willvault.storage import StorageProvider

CSV_HEADER = ["scheme", "op", "atoms", "avg_s", "stddev_s", "median_s"]
KEYGEN_SIZES = (5, 10, 20, 30)


class ConfigError(ValueError):
    pass


class ScenarioError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------


@dataclass
class BenchConfig:
    atom_counts: list[int]
    sharing_factor: int = 50
    attribute_universe_size: int = 64
    repetitions: int = 10
    seed: int = 0
    key_attr_count: int = 30
    payload_bytes: int = 256

    def __post_init__(self):
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.sharing_factor < 1:
            raise ConfigError("sharing factor must be >= 1")
        if not self.atom_counts or any(a < 1 for a in self.atom_counts):
            raise ConfigError("atom counts must be positive")


@dataclass
class BenchResult:
    rows: list[dict] = field(default_factory=list)
    pair_counts: dict[int, int] = field(default_factory=dict)
    policies: list[str] = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
            writer.writeheader()
            writer.writerows(self.rows)


def _random_policy_text(rng: random.Random, universe: list[str]) -> str:
    """Random full binary gate tree, 2 to 4 levels deep."""
    depth = rng.randint(2, 4)

    def build(level: int) -> str:
        if level >= depth:
            return rng.choice(universe)
        op = rng.choice(["and", "or"])
        return f"({build(level + 1)} {op} {build(level + 1)})"

    return build(1)


def generate_workload(config: BenchConfig) -> tuple[list[str], list[str]]:
    """Policy pool plus the benchmark attribute universe.

    The pool is sized for the largest atom count, so every run over the
    same config encrypts the same policy structure and only the payload
    volume varies with the atom count.
    """
    rng = random.Random(config.seed)
    universe = [f"attr{i:02d}" for i in range(config.attribute_universe_size)]
    pool_size = max(1, -(-max(config.atom_counts) // config.sharing_factor))
    pool = [_random_policy_text(rng, universe) for _ in range(pool_size)]
    return pool, universe


def _timed(reps: int, fn) -> dict[str, float]:
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return {
        "avg_s": statistics.fmean(samples),
        "stddev_s": statistics.pstdev(samples) if len(samples) > 1 else 0.0,
        "median_s": statistics.median(samples),
    }


def run_bench(config: BenchConfig, group=None) -> BenchResult:
    group = group or default_group()
    pool, universe = generate_workload(config)
    result = BenchResult(policies=list(pool))
    rng = random.Random(config.seed + 1)
    key_attrs = set(rng.sample(universe, min(config.key_attr_count,
                                             len(universe))))

    def row(scheme, op, atoms, stats):
        result.rows.append({"scheme": scheme, "op": op, "atoms": atoms,
                            **{k: f"{v:.6f}" for k, v in stats.items()}})

    # setup
    row("pdcpabe", "setup", "-",
        _timed(config.repetitions, lambda: pdcpabe.setup(128, group=group)))
    row("bsw07", "setup", "-",
        _timed(config.repetitions, lambda: bsw07.bsw_setup(128, group=group)))

    pp, mk = pdcpabe.setup(128, rng=rng, group=group)
    bpp, bmk = bsw07.bsw_setup(128, rng=rng, group=group)

    # keygen at fixed attribute counts
    for n_attrs in KEYGEN_SIZES:
        attrs = set(universe[:n_attrs])
        row("pdcpabe", "keygen", n_attrs,
            _timed(config.repetitions,
                   lambda: pdcpabe.keygen(mk, pp, attrs)))
        row("bsw07", "keygen", n_attrs,
            _timed(config.repetitions,
                   lambda: bsw07.bsw_keygen(bmk, bpp, attrs)))

    key = pdcpabe.keygen(mk, pp, key_attrs, rng=rng)
    bkey = bsw07.bsw_keygen(bmk, bpp, key_attrs, rng=rng)
    payload = bytes(config.payload_bytes)

    for atoms in config.atom_counts:
        items = [(f"atom{i:05d}", payload, pool[i % len(pool)])
                 for i in range(atoms)]

        ct_holder = {}

        def encrypt_once():
            ct_holder["ct"] = pdcpabe.encrypt(pp, items, rng=rng)

        row("pdcpabe", "encrypt", atoms,
            _timed(config.repetitions, encrypt_once))
        ct = ct_holder["ct"]
        result.pair_counts[atoms] = ct.attribute_pair_count()
        row("pdcpabe", "decrypt", atoms,
            _timed(config.repetitions, lambda: pdcpabe.decrypt(pp, key, ct)))

        bct_holder = {}

        def bsw_encrypt_all():
            bct_holder["cts"] = [
                bsw07.bsw_encrypt(bpp, payload, pool[i % len(pool)], rng=rng)
                for i in range(atoms)]

        row("bsw07", "encrypt", atoms,
            _timed(config.repetitions, bsw_encrypt_all))
        bcts = bct_holder["cts"]

        def bsw_decrypt_all():
            for bct in bcts:
                bsw07.bsw_decrypt(bpp, bkey, bct)

        row("bsw07", "decrypt", atoms,
            _timed(config.repetitions, bsw_decrypt_all))

    return result


# ---------------------------------------------------------------------------
# Scenario runner
# ---------------------------------------------------------------------------


def run_scenario(scenario_path: Path, out_dir: Path) -> int:
    try:
        scenario = json.loads(scenario_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc

    out_dir.mkdir(parents=True, exist_ok=True)
    will_path = scenario_path.parent / scenario["will"]
    will_bytes = will_path.read_bytes()

    n_providers = scenario.get("providers", 4)
    providers = [StorageProvider(f"loc-{i}") for i in range(n_providers)]
    for loc, fault in scenario.get("provider_faults", {}).items():
        provider = next(p for p in providers if p.location_id == loc)
        provider.set_fault(**{fault: True})

    adapters = {}
    for platform_id, kind in scenario.get(
            "adapters", {"social": "social", "email": "email",
                         "cloudfile": "cloudfile"}).items():
        adapters[platform_id] = builtin_adapter(platform_id, kind)

    authority_sk, authority_pk = generate_authority_keys()
    kdf_cfg = scenario.get("kdf", {})
    kdf = KdfConfig(n=kdf_cfg.get("n", 2 ** 14))
    salt = bytes.fromhex(kdf_cfg.get("salt_hex", "00" * 16))

    broker = Broker(providers, adapters, authority_public_key=authority_pk,
                    clock=SimClock(), rng=random.Random(scenario.get("seed", 0)))
    will = willfile.parse_xml(will_bytes)
    wid = will.will_id

    heir_keys = {
        heir_id: derive_keypair(pw, salt, config=kdf)
        for heir_id, pw in scenario.get("heir_passwords", {}).items()
    }

    failures = []
    for i, step in enumerate(scenario.get("steps", [])):
        op = step.get("op")
        expect_error = step.get("expect_error")
        label = f"step {i} ({op})"
        try:
            if op == "deploy":
                broker.deploy(will)
            elif op == "request_trigger":
                broker.request_trigger(wid, step["heir"])
            elif op == "vote":
                broker.vote(wid, step["heir"])
            elif op == "veto":
                broker.veto(wid, step.get("credential", will.creator_id))
            elif op == "override":
                attestation = (sign_override(authority_sk, wid)
                               if step.get("valid", True) else b"garbage")
                broker.authority_override(wid, attestation)
            elif op == "delete":
                broker.delete_will(wid)
            elif op == "tick":
                broker.tick(broker.clock.now_ms()
                            + int(step.get("advance_s", 0)) * 1000)
            elif op == "execute":
                report = broker.execute(wid)
                (out_dir / "report.json").write_text(report.to_json() + "\n")
            elif op == "retrieve":
                heir = step["heir"]
                results = broker.retrieve(wid, heir, heir_keys[heir].sk)
                summary = {
                    platform: {
                        "recovered": sorted(rep.recovered),
                        "denied": rep.denied,
                    } for platform, rep in results.items()
                }
                (out_dir / f"retrieve_{heir}.json").write_text(
                    json.dumps(summary, indent=2, sort_keys=True) + "\n")
                if "expect_recovered" in step:
                    got = sum(len(r["recovered"]) for r in summary.values())
                    if got != step["expect_recovered"]:
                        failures.append(
                            f"{label}: recovered {got} payloads, expected "
                            f"{step['expect_recovered']}")
            elif op == "expect_state":
                actual = broker.wills[wid].state.value
                if actual != step["state"]:
                    failures.append(
                        f"{label}: state {actual}, expected {step['state']}")
            elif op == "inspect":
                findings = ledger_mod.inspect(broker.chain,
                                              broker.inspection_params())
                if len(findings) != step.get("expect_findings", 0):
                    failures.append(
                        f"{label}: {len(findings)} findings, expected "
                        f"{step.get('expect_findings', 0)}")
            else:
                raise ScenarioError(f"unknown scenario op {op!r}")
        except ScenarioError:
            raise
        except Exception as exc:  # noqa: BLE001 - mapped to scenario verdicts
            if expect_error:
                if type(exc).__name__ != expect_error:
                    failures.append(
                        f"{label}: raised {type(exc).__name__}, expected "
                        f"{expect_error}")
            else:
                failures.append(f"{label}: unexpected {type(exc).__name__}: {exc}")
            continue
        if expect_error:
            failures.append(f"{label}: succeeded but expected {expect_error}")

    broker.chain.save(out_dir / "chain.log")
    findings = ledger_mod.inspect(broker.chain, broker.inspection_params())
    (out_dir / "findings.json").write_text(json.dumps(
        [{"seq": f.seq, "rule": f.rule_id, "description": f.description,
          "severity": f.severity} for f in findings], indent=2) + "\n")

    for line in failures:
        print(f"FAIL {line}", file=sys.stderr)
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Thin commands
# ---------------------------------------------------------------------------


def _cmd_setup(args) -> int:
    pp, mk = pdcpabe.setup(args.security_level)
    Path(args.out_params).write_bytes(pp.to_bytes())
    Path(args.out_master).write_bytes(mk.to_bytes(pp.group))
    print(f"wrote {args.out_params} and {args.out_master}")
    return 0


def _cmd_keygen(args) -> int:
    group = default_group()
    pp = pdcpabe.PublicParams.from_bytes(Path(args.params).read_bytes(), group)
    mk = pdcpabe.MasterKey.from_bytes(Path(args.master).read_bytes(), group)
    attrs = {a.strip() for a in args.attrs.split(",") if a.strip()}
    key = pdcpabe.keygen(mk, pp, attrs)
    Path(args.out).write_bytes(key.to_bytes(group))
    print(f"wrote key for {sorted(attrs)} to {args.out}")
    return 0


def _cmd_encrypt(args) -> int:
    group = default_group()
    pp = pdcpabe.PublicParams.from_bytes(Path(args.params).read_bytes(), group)
    policy_map = json.loads(Path(args.policy_map).read_text())
    directory = Path(args.directory)
    items = []
    for name, pol in sorted(policy_map.items()):
        path = directory / name
        if not path.is_file():
            print(f"missing input file {path}", file=sys.stderr)
            return 1
        items.append((name, path.read_bytes(), pol))
    ct = pdcpabe.encrypt(pp, items)
    Path(args.out).write_bytes(ct.to_bytes(group))
    print(f"encrypted {len(items)} files into {args.out}")
    return 0


def _cmd_decrypt(args) -> int:
    group = default_group()
    pp = pdcpabe.PublicParams.from_bytes(Path(args.params).read_bytes(), group)
    key = pdcpabe.UserKey.from_bytes(Path(args.key).read_bytes(), group)
    ct = pdcpabe.Ciphertext.from_bytes(Path(args.ciphertext).read_bytes(), group)
    report = pdcpabe.decrypt(pp, key, ct)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for pid, data in report.recovered.items():
        (out_dir / pid).write_bytes(data)
    print(json.dumps({
        "recovered": sorted(report.recovered),
        "denied": report.denied,
    }, indent=2))
    return 0


def _cmd_split(args) -> int:
    data = Path(args.file).read_bytes()
    n = args.locations
    t = args.threshold or sharding.default_threshold(n)
    shares = sharding.split(data, n, t, file_id=Path(args.file).name)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for share in shares:
        path = out_dir / f"{share.file_id}.{share.share_id}.share"
        path.write_bytes(share.to_bytes())
    print(f"wrote {n} shares (threshold {t}) to {out_dir}")
    return 0


def _cmd_combine(args) -> int:
    shares = [sharding.Share.from_bytes(Path(p).read_bytes())
              for p in args.shares]
    try:
        data = sharding.combine(shares)
    except (sharding.ThresholdNotMet, sharding.InconsistentShares) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    Path(args.out).write_bytes(data)
    print(f"reconstructed {len(data)} bytes into {args.out}")
    return 0


def _cmd_will_validate(args) -> int:
    try:
        will = willfile.parse_xml(Path(args.file).read_bytes())
    except (willfile.SchemaViolation, policy.PolicySyntaxError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    for warning in willfile.coverage_warnings(will):
        print(f"warning: {warning}")
    print(f"ok: will {will.will_id} with {len(will.heirs)} heirs, "
          f"{len(will.content_policies)} policies")
    return 0


def _cmd_chain_verify(args) -> int:
    chain = ledger_mod.Chain.load(args.file)
    bad = ledger_mod.verify_chain(chain.entries)
    if bad is None:
        print(f"ok: {len(chain.entries)} entries, chain intact")
        return 0
    print(f"corrupt: first bad entry at seq {bad}", file=sys.stderr)
    return 1


def _cmd_inspect(args) -> int:
    chain = ledger_mod.Chain.load(args.chain)
    will = willfile.parse_xml(Path(args.will).read_bytes())
    params = {will.will_id: ledger_mod.WillRuleParams(
        vote_threshold=will.trigger.vote_threshold,
        freeze_duration_ms=will.trigger.freeze_duration_s * 1000)}
    findings = ledger_mod.inspect(chain, params)
    for f in findings:
        print(f"{f.severity.upper()} {f.rule_id} seq={f.seq}: {f.description}")
    if findings:
        return 1
    print("ok: no findings")
    return 0


def _cmd_bench(args) -> int:
    config = BenchConfig(
        atom_counts=[int(a) for a in args.atoms.split(",")],
        sharing_factor=args.sharing,
        repetitions=args.reps,
        seed=args.seed,
    )
    print(f"pairing backend: {BACKEND_NAME}; sharding kernel: "
          f"{sharding.KERNEL_NAME}")
    result = run_bench(config)
    result.to_csv(args.out)
    if args.counts_out:
        Path(args.counts_out).write_text(json.dumps(
            {"attribute_pair_counts": result.pair_counts,
             "distinct_policies": len(result.policies)}, indent=2) + "\n")
    print(f"wrote {len(result.rows)} rows to {args.out}")
    return 0


def _cmd_lifecycle(args) -> int:
    return run_scenario(Path(args.scenario), Path(args.out_dir))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="willvault",
        description="Digital-will escrow toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="scaling benchmark over both schemes")
    p.add_argument("--atoms", default="5,10,30", help="comma-separated counts")
    p.add_argument("--sharing", type=int, default=50,
                   help="atoms per distinct policy")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results.csv")
    p.add_argument("--counts-out", default=None,
                   help="write structural counts to this JSON file")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("lifecycle", help="run a scripted broker scenario")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_lifecycle)

    p = sub.add_parser("setup", help="generate system parameters")
    p.add_argument("--security-level", type=int, default=128)
    p.add_argument("--out-params", default="params.bin")
    p.add_argument("--out-master", default="master.bin")
    p.set_defaults(func=_cmd_setup)

    p = sub.add_parser("keygen", help="derive a user key for attributes")
    p.add_argument("--params", required=True)
    p.add_argument("--master", required=True)
    p.add_argument("--attrs", required=True, help="comma-separated attributes")
    p.add_argument("--out", default="userkey.bin")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a directory of files")
    p.add_argument("--params", required=True)
    p.add_argument("--dir", dest="directory", required=True)
    p.add_argument("--policy-map", required=True,
                   help="JSON file mapping filename to policy text")
    p.add_argument("--out", default="vault.bin")
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("decrypt", help="partially decrypt a vault file")
    p.add_argument("--params", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--ct", dest="ciphertext", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("split", help="split a file into shares")
    p.add_argument("--file", required=True)
    p.add_argument("--locations", type=int, required=True)
    p.add_argument("--threshold", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("combine", help="reconstruct a file from shares")
    p.add_argument("--out", required=True)
    p.add_argument("shares", nargs="+")
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("will-validate", help="validate a will document")
    p.add_argument("--file", required=True)
    p.set_defaults(func=_cmd_will_validate)

    p = sub.add_parser("chain-verify", help="verify a ledger file")
    p.add_argument("--file", required=True)
    p.set_defaults(func=_cmd_chain_verify)

    p = sub.add_parser("inspect", help="replay a ledger against a will's rules")
    p.add_argument("--chain", required=True)
    p.add_argument("--will", required=True)
    p.set_defaults(func=_cmd_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
