#!/usr/bin/env python3
"""Compare the compiled accelerator kernels against the pure-Python fallbacks.

Times the pairing-group primitives and the secret-sharing kernels on both
backends and prints a speedup table.  The compiled modules must be built
(pip install does this); the pure side is always available.

Usage: python benchmarks/compare_backends.py [--pairing-iters N] [--mib N]
"""

from __future__ import annotations

import argparse
import random
import time


def _time(fn, iters: int) -> float:
    t0 = time.perf_counter()
    for _ in range(iters):
        fn()
    return (time.perf_counter() - t0) / iters


def bench_pairing(iters: int) -> list[tuple[str, float, float]]:
    from willvault.pairing import _backend_py as py
    try:
        from willvault.pairing import _backend_cy as cy
    except ImportError:
        print("compiled pairing backend not built; skipping")
        return []
    rows = []
    k = random.Random(1).randrange(1, py.ORDER)
    for name, mod_ops in [
        ("G1 scalar mul", lambda m: m.G1.generator().mul(k)),
        ("G2 scalar mul", lambda m: m.G2.generator().mul(k)),
        ("pairing", lambda m: m.pair(m.G1.generator(), m.G2.generator())),
    ]:
        t_py = _time(lambda: mod_ops(py), max(1, iters // 4))
        t_cy = _time(lambda: mod_ops(cy), iters)
        rows.append((name, t_py, t_cy))
    e_py = py.pair(py.G1.generator(), py.G2.generator())
    e_cy = cy.pair(cy.G1.generator(), cy.G2.generator())
    rows.append(("GT exp",
                 _time(lambda: e_py.pow(k), max(1, iters // 4)),
                 _time(lambda: e_cy.pow(k), iters)))
    return rows


def bench_sharding(mib: int) -> list[tuple[str, float, float]]:
    from willvault.sharding import _gf256_py as py
    try:
        from willvault.sharding import _gf256_cy as cy
    except ImportError:
        print("compiled sharding kernel not built; skipping")
        return []
    rng = random.Random(2)
    data = rng.randbytes(mib << 20)
    coeffs = [rng.randbytes(len(data)) for _ in range(2)]  # threshold 3
    xs = [1, 2, 3, 4, 5]
    rows = [(
        f"split {mib} MiB into 5 (t=3)",
        _time(lambda: py.split_shares(data, coeffs, xs), 1),
        _time(lambda: cy.split_shares(data, coeffs, xs), 1),
    )]
    payloads = cy.split_shares(data, coeffs, xs)[:3]
    lambdas = [2, 3, 4]
    rows.append((
        f"combine 3 shares of {mib} MiB",
        _time(lambda: py.combine_shares(payloads, lambdas), 1),
        _time(lambda: cy.combine_shares(payloads, lambdas), 1),
    ))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairing-iters", type=int, default=20)
    parser.add_argument("--mib", type=int, default=4)
    args = parser.parse_args()

    rows = bench_pairing(args.pairing_iters) + bench_sharding(args.mib)
    if not rows:
        return 1
    width = max(len(r[0]) for r in rows)
    print(f"{'operation':<{width}}  {'pure (ms)':>10}  {'compiled (ms)':>13}  "
          f"{'speedup':>7}")
    for name, t_py, t_cy in rows:
        print(f"{name:<{width}}  {t_py * 1000:>10.3f}  {t_cy * 1000:>13.3f}  "
              f"{t_py / t_cy:>6.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
