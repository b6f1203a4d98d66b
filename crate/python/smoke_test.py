"""Smoke test for the helmscat Python extension.

Builds the extension in release mode, imports it and checks a few results
against closed-form values.

    python3 python/smoke_test.py
"""

import cmath
import importlib
import json
import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_import(dest):
    subprocess.run(["cargo", "build", "-p", "helmscat-py", "--release"], cwd=ROOT, check=True)
    lib = ROOT / "target" / "release" / "libhelmscat.so"
    shutil.copy(lib, Path(dest) / "helmscat.so")
    sys.path.insert(0, str(dest))
    return importlib.import_module("helmscat")


def check(name, ok, detail=""):
    print(f"{'ok' if ok else 'FAIL'} {name} {detail}")
    if not ok:
        raise SystemExit(1)


def main():
    with tempfile.TemporaryDirectory() as tmp:
        hs = build_and_import(tmp)

        # Translating the circle multiplies the amplitude by exp(ik c.(alpha - theta)).
        obs = [0.3, 1.1, 2.5]
        a0 = hs.circle_far_field((0.0, 0.0), 1.0, 2.0, 0.0, obs)
        a1 = hs.circle_far_field((1.0, 0.5), 1.0, 2.0, 0.0, obs)
        worst = max(
            abs(y - x * cmath.exp(2j * (1.0 - (math.cos(t) + 0.5 * math.sin(t)))))
            for x, y, t in zip(a0, a1, obs)
        )
        check("circle translation phase", worst < 1e-12, f"{worst:.2e}")

        b = hs.biem_far_field("unit-circle", 2.0, 0.0, obs)
        worst = max(abs(x - y) for x, y in zip(a0, b))
        check("biem matches circle series", worst < 1e-8, f"{worst:.2e}")

        m = hs.mrc_solve("unit-circle", 2.0, 0.0, obs)
        worst = max(abs(x - y) for x, y in zip(a0, m["far_field"]))
        check("mrc residual", m["r_min"] < 1e-5, f"{m['r_min']:.2e}")
        check("mrc matches circle series", worst < 1e-4, f"{worst:.2e}")

        r = hs.grating_residual("sine2x", math.pi, 1.0, math.pi / 4)
        check("grating residual", r < 1e-2, f"{r:.2e}")

        support = hs.sfm_circle_support((6.0, 2.0), 1.0, 5.0, directions=8)
        worst = max(abs(d - (6.0 * math.cos(t) + 2.0 * math.sin(t) - 1.0)) for t, d in support)
        check("support function", worst < 0.1, f"{worst:.2e}")

        scan = hs.lsm_circle_scan((10.0, 15.0), 1.0, 1.0, (10.0, 15.0), 6.0, 21, n=64)
        x, y = scan["argmin_ck"]
        check("sampling argmin", math.hypot(x - 10.0, y - 15.0) <= 1.5, f"({x:.2f}, {y:.2f})")

        check("bundled configs", "table3" in hs.bundled_configs())
        manifest = json.loads(hs.run_config("table3", str(Path(tmp) / "table3")))
        check("run_config", manifest["kind"] == "inverse-sfm" and (Path(tmp) / "table3" / "manifest.json").is_file())

        try:
            hs.biem_far_field("no-such-shape", 1.0, 0.0, obs)
        except ValueError as e:
            check("errors raise ValueError", "no-such-shape" in str(e), str(e))
        else:
            check("errors raise ValueError", False)

    print("smoke test passed")


if __name__ == "__main__":
    main()
