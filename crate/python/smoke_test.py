#!/usr/bin/env python3
"""Smoke test for the kkcheck_py extension module.

Builds nothing itself: run `cargo build -p kkcheck-py --release` (or debug)
first, then execute this script. It locates the compiled cdylib, loads it,
and exercises the main entry points.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path


def locate_extension() -> Path:
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libkkcheck_py.so", "kkcheck_py.dll", "libkkcheck_py.dylib")
    ]
    for c in candidates:
        if c.exists():
            return c
    sys.exit(
        "extension not found; build it with `cargo build -p kkcheck-py` first"
    )


def main() -> None:
    ext = locate_extension()
    staging = Path(tempfile.mkdtemp(prefix="kkcheck_py_"))
    target = staging / ("kkcheck_py" + (".pyd" if ext.suffix == ".dll" else ".so"))
    shutil.copy2(ext, target)
    sys.path.insert(0, str(staging))

    import kkcheck_py as kk

    print(f"loaded {kk.ENGINE_VERSION} from {ext}")

    inv = kk.lie_invariants("su2")
    assert inv["jacobi"] == 0.0
    assert inv["unimodularity"] == 0.0
    assert inv["ad_invariance"] == 0.0
    assert abs(inv["killing_contraction"] + 3.0) < 1e-12
    print("su2 invariants ok:", inv)

    b = kk.killing_form("su2")
    for i in range(3):
        for j in range(3):
            assert b[i][j] == (-2.0 if i == j else 0.0)
    print("su2 killing form is -2 I")

    assert abs(kk.lambda_effective(0.75, "su2")) < 1e-12
    assert kk.lambda_effective(0.0, "u1") == 0.0
    print("effective cosmological constant shifts ok")

    blocks = kk.flat_einstein_blocks("su2")
    for i in range(7):
        for j in range(7):
            expect = (-0.75 if i < 4 else -0.25) if i == j else 0.0
            assert abs(blocks[i][j] - expect) < 1e-10, (i, j, blocks[i][j])
    print("flat R^4 x SU(2) Einstein blocks: (-3/4, 0, -1/4)")

    res = kk.maxwell_solution_residuals(0.7, 50, 3)
    assert all(v < 1e-8 for v in res.values()), res
    print("circle-model solution residuals:", res)

    eym = kk.eym_vacuum_residuals(10, 4)
    assert all(v < 1e-7 for v in eym.values()), eym
    print("Einstein-Yang-Mills vacuum residuals:", eym)

    period = kk.detect_fiber_period(0.7, 1e3, 1e-7)
    assert period is not None and abs(period - 2 * math.pi) < 1e-6, period
    flux = kk.fiber_flux(0.7, [0.1, 0.2, -0.3, 0.4], 16)
    assert abs(flux - 2 * math.pi) < 1e-9
    print(f"fiber period {period:.9f}, flux {flux:.9f}")

    report = json.loads(kk.run_suite("lie", group="su2", seed=42))
    assert report["suite"] == "lie"
    assert all(c["pass"] for c in report["checks"]), report
    print(f"lie suite: {len(report['checks'])} checks pass")

    print("smoke test ok")


if __name__ == "__main__":
    main()
