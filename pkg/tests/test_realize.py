"""Pipeline and certificate tests.

The C2 run is the flagship: one module-scoped pipeline execution backs the
flag, payload, and re-verification tests.  Tampering tests go through the
JSON payload so they exercise exactly the surface an attacker would touch."""

import copy
import json

import pytest
from hypothesis import given, settings, strategies as st

from automizer.grouprep import FiniteGroup, InputGroupA, ScaleError, catalog_group
from automizer.permcore import PermGroup, parse_cycles
from automizer.realize import (
    FLAG_NAMES,
    Certificate,
    VerificationPolicy,
    automizer_oracle,
    bertrand_prime,
    build_fusion_for,
    run_pipeline,
    subgroup_count_lower_bound,
    tables_isomorphic,
    verify_certificate,
    verify_thm31,
)
from automizer.fusion import inner_fusion


@pytest.fixture(scope="module")
def c2_parts():
    A = InputGroupA.from_name("C2")
    S, system, U = build_fusion_for(A)
    return A, S, system, U


def fast_payload(cert):
    payload = json.loads(cert.to_json_bytes())
    payload["policy"]["level"] = "fast"
    return payload


class TestPolicy:
    def test_defaults(self):
        p = VerificationPolicy()
        assert p.max_subgroup_order == 4096
        assert p.max_subgroups == 20000
        assert p.max_n == 10 ** 6
        assert p.max_perm_degree == 150
        assert p.level == "full"

    def test_rejects_bad_level(self):
        with pytest.raises(ValueError):
            VerificationPolicy(level="paranoid")

    def test_rejects_nonpositive_bound(self):
        with pytest.raises(ValueError):
            VerificationPolicy(max_n=0)

    def test_payload_round_trip(self):
        p = VerificationPolicy(max_n=5000, level="fast")
        assert VerificationPolicy.from_payload(p.as_payload()) == p


class TestBertrand:
    def test_small_values(self):
        assert bertrand_prime(2) == 3
        assert bertrand_prime(4) == 5
        assert bertrand_prime(6) == 7

    def test_rejects_trivial(self):
        with pytest.raises(ValueError):
            bertrand_prime(1)

    @given(m=st.integers(2, 200))
    @settings(max_examples=80, deadline=None)
    def test_least_prime_in_window(self, m):
        p = bertrand_prime(m)
        assert m < p < 2 * m
        assert all(p % d for d in range(2, p))
        assert all(not all(q % d for d in range(2, q)) for q in range(m + 1, p))


class TestTableIsomorphism:
    def test_distinguishes_c4_from_klein(self):
        assert not tables_isomorphic(catalog_group("C4"), catalog_group("C2xC2"))

    def test_dihedral6_is_s3(self):
        assert tables_isomorphic(catalog_group("D6"), catalog_group("S3"))

    def test_distinguishes_d8_from_q8(self):
        assert not tables_isomorphic(catalog_group("D8"), catalog_group("Q8"))

    def test_reflexive(self):
        for name in ("1", "C2", "S4", "Q8"):
            g = catalog_group(name)
            assert tables_isomorphic(g, g)


class TestSubgroupBound:
    def test_matches_brute_count_for_elementary_abelian(self):
        # (Z/2)^4 has exactly the predicted number of subgroups
        g = catalog_group("C2xC2xC2xC2")
        assert len(g.all_subgroups()) == subgroup_count_lower_bound(2, 4) == 67

    def test_rejects_next_exponent(self):
        assert subgroup_count_lower_bound(3, 6) == 56632


class TestBuildFusion:
    def test_c2_shape(self, c2_parts):
        A, S, system, U = c2_parts
        assert S.order == 32
        assert U.order == 16
        assert len(system.generators) == 246
        assert len(system.lattice.keys) == 106

    def test_c3_scale_rejection(self):
        with pytest.raises(ScaleError) as exc:
            build_fusion_for(InputGroupA.from_name("C3"))
        assert exc.value.bound_name == "max_subgroups"

    def test_thm31_passes(self, c2_parts):
        A, S, system, U = c2_parts
        ok, rep = verify_thm31(S, system, U, A)
        assert ok, rep
        assert rep["aut_U_order"] == 2
        assert rep["largest_index"] > 4

    def test_thm31_rejects_inner_system(self, c2_parts):
        # the inner system has focal subgroup S' and full extension core
        A, S, system, U = c2_parts
        inner = inner_fusion(S, list(system.lattice.by_key.values()))
        ok, rep = verify_thm31(S, inner, U, A)
        assert not ok
        assert not rep["focal_full"]
        assert not rep["extension_core_trivial"]


class TestOracle:
    def test_s4_klein_automizer_is_s3(self):
        g = PermGroup([parse_cycles("(0 1)", 4), parse_cycles("(0 1 2 3)", 4)])
        v4 = [parse_cycles("(0 1)(2 3)", 4), parse_cycles("(0 2)(1 3)", 4)]
        aut = automizer_oracle(g, v4)
        assert aut.order == 6
        assert tables_isomorphic(aut, catalog_group("S3"))

    def test_a4_klein_automizer_is_c3(self):
        g = PermGroup([parse_cycles("(0 1 2)", 4), parse_cycles("(0 1)(2 3)", 4)])
        v4 = [parse_cycles("(0 1)(2 3)", 4), parse_cycles("(0 2)(1 3)", 4)]
        aut = automizer_oracle(g, v4)
        assert aut.order == 3
        assert tables_isomorphic(aut, catalog_group("C3"))

    def test_scale_guard(self):
        g = PermGroup([parse_cycles("(0 1)", 5), parse_cycles("(0 1 2 3 4)", 5)])
        with pytest.raises(ScaleError):
            automizer_oracle(g, [parse_cycles("(0 1)(2 3)", 5)], max_elements=10)


class TestPipeline:
    def test_accepted(self, c2_cert):
        assert c2_cert.accepted
        assert c2_cert.failed_stage is None
        assert all(c2_cert.flags[name] for name in FLAG_NAMES)

    def test_frozen_quantities(self, c2_cert):
        assert c2_cert.prime == 3
        assert c2_cert.exponent == 2
        assert c2_cert.biset["m"] == 8
        assert c2_cert.biset["n"] == 7792
        assert c2_cert.biset["orbit_count"] == 172
        assert len(c2_cert.fusion_generators) == 246
        assert c2_cert.embedding["top_closure_mode"] == "transitivity_only"
        assert c2_cert.embedding["base_index_convention"] == "target"

    def test_trivial_input_short_circuits(self):
        cert = run_pipeline(InputGroupA.from_name("1"))
        assert cert.accepted
        assert cert.prime is None
        assert cert.biset["n"] == 0
        ok, rep = verify_certificate(cert)
        assert ok, rep

    def test_json_round_trip(self, c2_cert, tmp_path):
        blob = c2_cert.to_json_bytes()
        again = Certificate.from_json_bytes(blob)
        assert again.to_json_bytes() == blob
        path = str(tmp_path / "cert.json")
        c2_cert.save(path)
        assert Certificate.load(path).flags == c2_cert.flags

    def test_acceptance_bit_is_checked_on_load(self, c2_cert):
        payload = json.loads(c2_cert.to_json_bytes())
        payload["flags"]["witnesses_ok"] = False
        with pytest.raises(ValueError):
            Certificate.from_payload(payload)

    def test_monotone_in_scale_bounds(self, c2_cert):
        raised = VerificationPolicy(
            max_subgroup_order=8192, max_subgroups=40000, max_n=10 ** 7
        )
        cert = run_pipeline(InputGroupA.from_name("C2"), raised)
        assert cert.flags == c2_cert.flags
        assert cert.accepted


class TestVerifyCertificate:
    def test_clean_full(self, c2_cert):
        ok, rep = verify_certificate(c2_cert)
        assert ok, rep
        assert rep["flag_mismatches"] == []

    def test_clean_fast(self, c2_cert):
        ok, rep = verify_certificate(Certificate.from_payload(fast_payload(c2_cert)))
        assert ok, rep

    def test_rejects_unaccepted(self, c2_cert):
        payload = fast_payload(c2_cert)
        payload["flags"]["biset_stable"] = False
        payload["accepted"] = False
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok
        assert "not accepted" in rep["reason"]

    def test_rejects_corrupt_input_table(self, c2_cert):
        payload = fast_payload(c2_cert)
        payload["input"]["table"] = [[0, 1], [1, 1]]
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok

    def test_rejects_wrong_table_hash(self, c2_cert):
        payload = fast_payload(c2_cert)
        payload["input"]["table_sha256"] = "0" * 64
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok
        assert "hash" in rep["reason"]

    def test_rejects_dropped_generator(self, c2_cert):
        payload = fast_payload(c2_cert)
        del payload["fusion_generators"][10]
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok
        assert "generator" in rep["reason"]

    def test_rejects_corrupt_slot_count(self, c2_cert):
        payload = fast_payload(c2_cert)
        payload["biset"]["n"] += 8
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok
        assert "orbit data" in rep["reason"]

    def test_rejects_corrupt_witness(self, c2_cert):
        payload = fast_payload(c2_cert)
        runs = payload["embedding"]["witnesses"][0]["base_runs"]
        runs[0][0] = (runs[0][0] + 1) % 32
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok

    def test_rejects_corrupt_prime(self, c2_cert):
        payload = fast_payload(c2_cert)
        payload["prime"] = 4
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok

    def test_rejects_corrupt_iota_image(self, c2_cert):
        payload = fast_payload(c2_cert)
        top = payload["embedding"]["iota_generators"][0]["top"]
        top[0], top[1] = top[1], top[0]
        ok, rep = verify_certificate(Certificate.from_payload(payload))
        assert not ok
