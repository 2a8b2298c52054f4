"""Run the full realization pipeline for a small input group, save the
certificate, and re-verify it from the file alone.

The default input C2 is the smallest nontrivial case and the one whose
numbers are pinned throughout the test suite: ambient order 32, 172 biset
orbits, wreath degree 7792.

    python3 scripts/certify_c2.py --out c2.cert.json
"""

import argparse
import time

from automizer.grouprep import InputGroupA
from automizer.realize import Certificate, run_pipeline, verify_certificate


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="C2", help="input group name (default C2)")
    ap.add_argument("--out", default="c2.cert.json", help="certificate path")
    ap.add_argument("--skip-verify", action="store_true",
                    help="skip the independent re-verification pass")
    args = ap.parse_args()

    A = InputGroupA.from_name(args.group)
    print("input group %s of order %d, exponent %d" % (A.name, A.order, A.e))

    t0 = time.perf_counter()
    cert = run_pipeline(A)
    t_run = time.perf_counter() - t0
    cert.save(args.out)
    data = cert.to_json_bytes()

    print("pipeline: %.1fs" % t_run)
    print("ambient order %d, exponent %d, rank %d" % (
        cert.ambient["order"], cert.ambient["exponent"], cert.ambient["rank"]))
    print("fusion generators: %d" % len(cert.fusion_generators))
    if cert.biset.get("orbits") is not None:
        print("biset: %d orbits, multiplier %d, %d slots" % (
            cert.biset.get("orbit_count", len(cert.biset["orbits"])),
            cert.biset["m"], cert.biset["n"]))
    if cert.prime is not None:
        print("prime: %d" % cert.prime)
    for name, value in cert.flags.items():
        print("  %-22s %s" % (name, "ok" if value else "FAILED"))
    print("accepted: %s" % cert.accepted)
    print("certificate: %s (%d bytes)" % (args.out, len(data)))

    if not args.skip_verify:
        t0 = time.perf_counter()
        ok, report = verify_certificate(Certificate.load(args.out))
        t_ver = time.perf_counter() - t0
        print("independent verification: %s in %.1fs" % ("ok" if ok else "REJECTED", t_ver))
        if not ok:
            print("  reason: %s" % report.get("reason"))
            return 1
    return 0 if cert.accepted else 1


if __name__ == "__main__":
    raise SystemExit(main())
