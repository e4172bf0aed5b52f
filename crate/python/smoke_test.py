#!/usr/bin/env python3
"""Smoke test for the etfkit Python extension.

Build and stage the module first:

    cargo build -p etfkit-py
    cp target/debug/libetfkit.so python/etfkit.so

then run `python3 python/smoke_test.py`. If python/etfkit.so is missing,
the script copies it from target/debug automatically.
"""

import json
import math
import pathlib
import shutil
import sys

HERE = pathlib.Path(__file__).resolve().parent
REPO = HERE.parent


def stage_module():
    staged = HERE / "etfkit.so"
    for profile in ("debug", "release"):
        built = REPO / "target" / profile / "libetfkit.so"
        if built.exists() and (
            not staged.exists() or built.stat().st_mtime > staged.stat().st_mtime
        ):
            shutil.copy2(built, staged)
            break
    if not staged.exists():
        sys.exit("etfkit.so not found; run `cargo build -p etfkit-py` first")


stage_module()
sys.path.insert(0, str(HERE))
import etfkit  # noqa: E402


def check(label, condition):
    status = "ok" if condition else "FAIL"
    print(f"  {label}: {status}")
    if not condition:
        sys.exit(1)


def validate_schema(label, instance, schema_name):
    try:
        import jsonschema
    except ImportError:
        print(f"  {label}: skipped (jsonschema not installed)")
        return
    schema = json.loads((REPO / "schemas" / schema_name).read_text())
    jsonschema.validate(instance=instance, schema=schema)
    print(f"  {label}: ok")


print("construction")
s3 = etfkit.simplex_etf(3)
check("simplex(3) shape", (s3.dim, s3.size) == (3, 4))
check("simplex(3) coherence", abs(s3.coherence - 1 / 3) < 1e-9)

affine = etfkit.steiner_etf("affine", 2, "real")
check("steiner affine q=2 shape", (affine.dim, affine.size) == (6, 16))
check(
    "steiner coherence = welch",
    abs(affine.coherence - etfkit.welch_bound(16, 6)) < 1e-9,
)

fano = etfkit.steiner_etf("projective", 2, "real")
check("fano shape", (fano.dim, fano.size) == (7, 28))

comp = etfkit.naimark_complement(affine)
check("naimark shape", (comp.dim, comp.size) == (10, 16))
check("naimark coherence", abs(comp.coherence - 0.2) < 1e-9)

untf = etfkit.random_untf(3, 7, real=False, seed=42)
check("random untf is UNTF", etfkit.verify(untf)["is_untf"])

print("verification")
report = etfkit.verify(affine)
check("affine is ETF", report["is_etf"])
validate_schema("frame report schema", report, "frame_report.schema.json")

print("json roundtrip")
again = etfkit.Frame.from_json(affine.to_json())
flat = [z for row in affine.synthesis() for z in row]
flat2 = [z for row in again.synthesis() for z in row]
check("bit-exact entries", flat == flat2)

print("perturbation")
pc = etfkit.pert_check(affine)
check("overlap + gap pass", pc["passed"])
check("affine gap kernel dim", pc["gap"]["kernel_dim"] == 4)
fano_gap = etfkit.pert_check(fano)["gap"]
check("fano gap vanishes", abs(fano_gap["min_eig"]) < 1e-9 and fano_gap["kernel_dim"] == 7)

n = s3.size
identity = [[complex(i == j) for j in range(n)] for i in range(n)]
projected = etfkit.project_pert(s3, identity)
check(
    "projector annihilates identity",
    max(abs(z) for row in projected for z in row) < 1e-9,
)

print("witness")
y = etfkit.sos_witness(s3)
check("witness size", len(y) == n * n)
wreport = etfkit.verify_witness(y, s3)
check("membership", wreport["passed"])
validate_schema("witness report schema", wreport, "verification_report.schema.json")
try:
    etfkit.sos_witness(fano)
    check("fano witness rejected", False)
except ValueError:
    check("fano witness rejected", True)

print("sparsity")
sp = etfkit.spark(s3, exact=True)
check("spark simplex(3)", sp["spark_exact"] == 4)
check("cospark simplex(3)", sp["cospark_exact"] == 2)
check("bounds valid", sp["bounds_valid"])
validate_schema("bound report schema", sp, "bound_report.schema.json")
check("gershgorin", abs(etfkit.gershgorin_bound(1 / 3) - 4) < 1e-9)
check("nerf", abs(etfkit.nerf_bound(4, 3) - 4) < 1e-9)
check("corollary duality", math.isclose(
    etfkit.corollary_bounds(16, 6)[1], etfkit.corollary_bounds(16, 10)[0]
))

print("table")
rows = etfkit.table1(11)
check("four families", len(rows) == 4)
check("all q=11 rows match", all(
    r["gershgorin_match"] and r["nerf_match"] and r["ours_match"] for r in rows
))
check("affine gershgorin = 132", abs(rows[0]["gershgorin"] - 132) < 1e-9)

print("hadamard")
h = etfkit.real_hadamard_matrix(12)
check("order 12 exists", len(h) == 12 and all(abs(abs(z) - 1) < 1e-12 for z in h[0]))
d = etfkit.dft_matrix(4)
check("dft(4) row 1", abs(d[1][1] - 1j) < 1e-12)

print("all smoke tests passed")
