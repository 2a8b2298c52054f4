"""Brute-force oracles and perturbation harnesses.

Everything here exists to check the main modules against independent
computations: ambient-conjugation fusion by direct enumeration, fixed-point
tables by materializing coset spaces, and a structured corruption suite that
an accepted certificate must survive in full."""

import copy
import json
from dataclasses import dataclass

from .biset import SemicharacteristicBiset
from .fusion import FusionSystem, Morphism, generate
from .grouprep import FiniteGroup, ScaleError, Subgroup
from .permcore import PermGroup, Permutation, parse_cycles
from .realize import Certificate, verify_certificate


# -- surrogate corpus --------------------------------------------------------------


@dataclass(frozen=True)
class SurrogatePair:
    """An ambient permutation group with a designated subgroup, both given by
    cycle-notation generator literals so the corpus is fixed in the repo."""

    name: str
    degree: int
    group_cycles: tuple
    subgroup_cycles: tuple

    def group(self) -> PermGroup:
        return PermGroup([parse_cycles(c, self.degree) for c in self.group_cycles])

    def subgroup_generators(self) -> list[Permutation]:
        return [parse_cycles(c, self.degree) for c in self.subgroup_cycles]


_CORPUS_LITERALS = [
    ("S3/S3", 3, ("(0 1)", "(0 1 2)"), ("(0 1)", "(0 1 2)")),
    ("S3/C3", 3, ("(0 1)", "(0 1 2)"), ("(0 1 2)",)),
    ("S3/C2", 3, ("(0 1)", "(0 1 2)"), ("(0 1)",)),
    ("S4/D8", 4, ("(0 1)", "(0 1 2 3)"), ("(0 1 2 3)", "(0 2)")),
    ("S4/V4", 4, ("(0 1)", "(0 1 2 3)"), ("(0 1)(2 3)", "(0 2)(1 3)")),
    ("S4/S3", 4, ("(0 1)", "(0 1 2 3)"), ("(0 1)", "(0 1 2)")),
    ("S4/C4", 4, ("(0 1)", "(0 1 2 3)"), ("(0 1 2 3)",)),
    ("A4/V4", 4, ("(0 1 2)", "(0 1)(2 3)"), ("(0 1)(2 3)", "(0 2)(1 3)")),
    ("A4/C3", 4, ("(0 1 2)", "(0 1)(2 3)"), ("(0 1 2)",)),
    ("A4/A4", 4, ("(0 1 2)", "(0 1)(2 3)"), ("(0 1 2)", "(0 1)(2 3)")),
    ("D8/C4", 4, ("(0 1 2 3)", "(0 2)"), ("(0 1 2 3)",)),
    ("D8/C2", 4, ("(0 1 2 3)", "(0 2)"), ("(0 2)",)),
    ("A5/V4", 5, ("(0 1 2 3 4)", "(0 1 2)"), ("(0 1)(2 3)", "(0 2)(1 3)")),
    ("A5/C5", 5, ("(0 1 2 3 4)", "(0 1 2)"), ("(0 1 2 3 4)",)),
    ("A5/S3", 5, ("(0 1 2 3 4)", "(0 1 2)"), ("(0 1 2)", "(0 1)(3 4)")),
    ("S5/D8", 5, ("(0 1)", "(0 1 2 3 4)"), ("(0 1 2 3)", "(0 2)")),
    ("S5/S4", 5, ("(0 1)", "(0 1 2 3 4)"), ("(0 1)", "(0 1 2 3)")),
    ("S5/C6", 5, ("(0 1)", "(0 1 2 3 4)"), ("(0 1 2)(3 4)",)),
    ("S5/A4", 5, ("(0 1)", "(0 1 2 3 4)"), ("(0 1 2)", "(0 1)(2 3)")),
    ("S6/Syl2", 6, ("(0 1)", "(0 1 2 3 4 5)"), ("(0 1 2 3)", "(0 2)", "(4 5)")),
    ("S6/C6", 6, ("(0 1)", "(0 1 2 3 4 5)"), ("(0 1 2 3 4 5)",)),
    ("A6/D8", 6, ("(0 1 2)", "(1 2 3 4 5)"), ("(0 1 2 3)(4 5)", "(0 2)(4 5)")),
    ("S7/Syl2", 7, ("(0 1)", "(0 1 2 3 4 5 6)"), ("(0 1 2 3)", "(0 2)", "(4 5)")),
    ("C12/C4", 12, ("(0 1 2 3 4 5 6 7 8 9 10 11)",),
     ("(0 3 6 9)(1 4 7 10)(2 5 8 11)",)),
    ("D12/C6", 6, ("(0 1 2 3 4 5)", "(1 5)(2 4)"), ("(0 1 2 3 4 5)",)),
    ("D12/C2", 6, ("(0 1 2 3 4 5)", "(1 5)(2 4)"), ("(1 5)(2 4)",)),
]


def corpus() -> list[SurrogatePair]:
    return [SurrogatePair(n, d, g, s) for n, d, g, s in _CORPUS_LITERALS]


def regular_representation(G: FiniteGroup) -> list[Permutation]:
    """Left translations as permutations of the element indices."""
    return [Permutation(tuple(G.mul(g, x) for x in range(G.order))) for g in range(G.order)]


# -- exhaustive ambient fusion -------------------------------------------------------


def abstract_subgroup(S0_gens: list[Permutation]) -> tuple[FiniteGroup, list[Permutation]]:
    table, elems = FiniteGroup.from_permutations(S0_gens, name="S0")
    return table, elems


def _conjugation_images(G0: PermGroup, elems: list[Permutation]):
    """For every ambient element, the partial map on subgroup indices induced
    by conjugation, as a list (None where the image leaves the subgroup)."""
    index = {p: i for i, p in enumerate(elems)}
    for g in G0.elements():
        gi = g.inverse()
        yield [index.get(g * p * gi) for p in elems]


def brute_fusion(G0: PermGroup, S0_gens: list[Permutation], max_order: int = 10 ** 4) -> FusionSystem:
    """The ambient-conjugation fusion system on S0, by enumerating every c_g
    on every subgroup of S0 directly."""
    if G0.order() > max_order:
        raise ScaleError("max_brute_order", max_order, G0.order())
    table, elems = abstract_subgroup(S0_gens)
    subs = table.all_subgroups()
    morphisms = set()
    for cmap in _conjugation_images(G0, elems):
        for sub in subs:
            images = []
            for x in sub.elements:
                y = cmap[x]
                if y is None:
                    images = None
                    break
                images.append(y)
            if images is not None:
                morphisms.add(Morphism(sub.elements, tuple(images)))
    return generate(table, subs, sorted(morphisms))


def conjugation_generators(G0: PermGroup, S0_gens: list[Permutation]) -> tuple[FiniteGroup, list[Morphism]]:
    """Each ambient element's conjugation on its maximal domain inside S0.
    Closing these under the fusion axioms must reproduce brute_fusion."""
    table, elems = abstract_subgroup(S0_gens)
    out = set()
    for cmap in _conjugation_images(G0, elems):
        domain = tuple(sorted(x for x in range(table.order) if cmap[x] is not None))
        out.add(Morphism(domain, tuple(cmap[x] for x in domain)))
    return table, sorted(out)


# -- exhaustive marks ----------------------------------------------------------------


def _orbit_cosets(G: FiniteGroup, source, images) -> list[frozenset]:
    """The coset space of a twisted diagonal inside G x G, materialized."""
    pos = {x: i for i, x in enumerate(source)}
    seen = set()
    cosets = []
    for x in range(G.order):
        for y in range(G.order):
            if (x, y) in seen:
                continue
            coset = frozenset(
                (G.mul(x, u), G.mul(y, images[pos[u]])) for u in source
            )
            seen.update(coset)
            cosets.append(coset)
    return cosets


def brute_marks_table(
    system: FusionSystem, X: SemicharacteristicBiset, max_points: int = 512
) -> dict:
    """Fixed-point counts of the biset under every fusion-twisted diagonal,
    computed on the literal coset space.  Small systems only."""
    G = system.ambient
    if X.n > max_points:
        raise ScaleError("max_points", max_points, X.n)
    points = []
    for rec in X.orbits:
        for coset in _orbit_cosets(G, rec.source, rec.images):
            points.extend([coset] * rec.multiplicity)
    table = {}
    for skey in system.lattice.keys:
        pos = {x: i for i, x in enumerate(skey)}
        for phi in system.hom_set(skey):
            count = 0
            for coset in points:
                if all(
                    frozenset((G.mul(u, a), G.mul(phi.images[pos[u]], b)) for a, b in coset)
                    == coset
                    for u in skey
                ):
                    count += 1
            table[(skey, phi.images)] = count
    return table


# -- structured certificate corruption -----------------------------------------------


def _non_leading_orbit(payload) -> int:
    orbits = payload["biset"]["orbits"]
    for i in range(len(orbits) - 1, 0, -1):
        return i
    raise ValueError("certificate has no correction orbits to corrupt")


def _orbit_slot_index(payload, i) -> int:
    # slot tables are aligned with the orbit list; the representative count
    # is the subgroup index, so n can be patched without rebuilding closures
    return len(payload["embedding"]["slot_tables"][i]["coset_representatives"])


def _mut_drop_orbit(payload):
    del payload["biset"]["orbits"][_non_leading_orbit(payload)]


def _mut_drop_orbit_fix_n(payload):
    # orbit 1 is the first correction orbit; dropping it (consistently, with
    # n and the slot tables patched) leaves an unbalanced biset that only the
    # stability recheck can catch
    rec = payload["biset"]["orbits"][1]
    payload["biset"]["n"] -= rec["multiplicity"] * _orbit_slot_index(payload, 1)
    del payload["biset"]["orbits"][1]
    del payload["embedding"]["slot_tables"][1]


def _mut_bump_multiplicity(payload):
    payload["biset"]["orbits"][_non_leading_orbit(payload)]["multiplicity"] += 1


def _mut_bump_multiplicity_fix_n(payload):
    payload["biset"]["orbits"][1]["multiplicity"] += 1
    payload["embedding"]["slot_tables"][1]["multiplicity"] += 1
    payload["biset"]["n"] += _orbit_slot_index(payload, 1)


def _mut_corrupt_witness_base(payload):
    runs = payload["embedding"]["witnesses"][0]["base_runs"]
    runs[0][0] = (runs[0][0] + 1) % payload["ambient"]["order"]


def _mut_corrupt_witness_top(payload):
    # swap across orbit blocks: slots inside one multiplicity block are
    # interchangeable (equal base entries), so an in-block swap would still
    # be a valid witness
    top = payload["embedding"]["witnesses"][-1]["top"]
    top[0], top[-1] = top[-1], top[0]


def _mut_corrupt_generator(payload):
    images = payload["fusion_generators"][0]["generator_images"]
    images[0], images[1] = images[1], images[0]


def _mut_drop_generator(payload):
    del payload["fusion_generators"][len(payload["fusion_generators"]) // 2]


def _mut_flip_flag(payload):
    payload["flags"]["biset_stable"] = False
    payload["accepted"] = False


def _mut_inconsistent_flag(payload):
    payload["flags"]["witnesses_ok"] = False


def _mut_corrupt_n(payload):
    payload["biset"]["n"] += payload["ambient"]["order"]


def _mut_corrupt_m(payload):
    payload["biset"]["m"] += 1


def _mut_corrupt_prime(payload):
    payload["prime"] = payload["prime"] * 2


def _mut_corrupt_iota(payload):
    top = payload["embedding"]["iota_generators"][-1]["top"]
    top[0], top[1] = top[1], top[0]


def _mut_corrupt_input_table(payload):
    table = payload["input"]["table"]
    if len(table) < 2:
        raise ValueError("trivial table cannot be corrupted meaningfully")
    table[1][0], table[1][-1] = table[1][-1], table[1][0]


def _mut_corrupt_slot_table(payload):
    reps = payload["embedding"]["slot_tables"][-1]["coset_representatives"]
    reps[0] += 1


# (name, mutator, stability-sensitive): stability-sensitive corruptions keep
# the stored check level; the rest can re-verify at the fast level
STANDARD_MUTATIONS = [
    ("drop_orbit", _mut_drop_orbit, False),
    ("drop_orbit_fix_n", _mut_drop_orbit_fix_n, True),
    ("bump_multiplicity", _mut_bump_multiplicity, False),
    ("bump_multiplicity_fix_n", _mut_bump_multiplicity_fix_n, True),
    ("corrupt_witness_base", _mut_corrupt_witness_base, False),
    ("corrupt_witness_top", _mut_corrupt_witness_top, False),
    ("corrupt_generator_image", _mut_corrupt_generator, False),
    ("drop_generator", _mut_drop_generator, False),
    ("flip_flag", _mut_flip_flag, False),
    ("inconsistent_flag", _mut_inconsistent_flag, False),
    ("corrupt_n", _mut_corrupt_n, False),
    ("corrupt_m", _mut_corrupt_m, False),
    ("corrupt_prime", _mut_corrupt_prime, False),
    ("corrupt_iota_image", _mut_corrupt_iota, False),
    ("corrupt_input_table", _mut_corrupt_input_table, False),
    ("corrupt_slot_table", _mut_corrupt_slot_table, False),
]


def mutation_suite(cert: Certificate, names=None) -> dict:
    """Apply every standard corruption to a fresh copy of the certificate and
    re-verify.  Report per-mutation rejection; all_rejected is the verdict."""
    base = json.loads(cert.to_json_bytes())
    results = {}
    if names is not None:
        known = {entry[0] for entry in STANDARD_MUTATIONS}
        missing = sorted(set(names) - known)
        if missing:
            raise ValueError("unknown mutation names: %s" % ", ".join(missing))
    selected = [
        entry for entry in STANDARD_MUTATIONS if names is None or entry[0] in names
    ]
    for name, mutate, needs_level in selected:
        payload = copy.deepcopy(base)
        if not needs_level:
            payload["policy"]["level"] = "fast"
        try:
            mutate(payload)
            mutated = Certificate.from_payload(payload)
        except (ValueError, KeyError, IndexError) as exc:
            results[name] = {"rejected": True, "reason": "payload rejected: %s" % exc}
            continue
        try:
            ok, report = verify_certificate(mutated)
        except ScaleError as exc:
            results[name] = {"rejected": True, "reason": "scale: %s" % exc}
            continue
        results[name] = {
            "rejected": not ok,
            "reason": report.get("reason", "flag mismatch: %s" % report.get("flag_mismatches")),
        }
    results["all_rejected"] = all(
        v["rejected"] for k, v in results.items() if k != "all_rejected"
    )
    return results
