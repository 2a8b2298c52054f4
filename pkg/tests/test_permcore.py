"""Permutation arithmetic and stabilizer chains against brute-force oracles."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from automizer.permcore import (
    PermGroup,
    Permutation,
    alternating_gens,
    compose,
    format_cycles,
    identity_perm,
    is_alternating_or_symmetric,
    parse_cycles,
    symmetric_gens,
)


def brute_elements(gens, degree):
    """Oracle: full element set by BFS over right multiplication."""
    ident = tuple(range(degree))
    seen = {ident}
    queue = [ident]
    words = [g.images for g in gens]
    for cur in queue:
        for w in words:
            nxt = tuple(cur[j] for j in w)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def brute_normal_closure(seeds, gens, degree):
    """Oracle: smallest subgroup containing seeds, closed under conjugation."""
    conjugators = brute_elements(gens, degree)
    core = set()
    work = [s.images for s in seeds]
    while work:
        h = work.pop()
        if h in core:
            continue
        for g in conjugators:
            ginv = [0] * degree
            for i, j in enumerate(g):
                ginv[j] = i
            conj = tuple(g[h[ginv[i]]] for i in range(degree))
            if conj not in core:
                work.append(conj)
        core.add(h)
    return brute_elements([Permutation(h) for h in core], degree)


perm_strategy = st.integers(2, 7).flatmap(
    lambda n: st.permutations(list(range(n))).map(Permutation)
)


def same_degree_pairs(count):
    return st.integers(2, 7).flatmap(
        lambda n: st.tuples(
            *(st.permutations(list(range(n))).map(Permutation) for _ in range(count))
        )
    )


class TestArithmetic:
    def test_compose_applies_right_factor_first(self):
        # Oracle by hand: q sends 0->1, p sends 1->2, so (p*q)(0) = 2.
        p = parse_cycles("(1 2)", degree=3)
        q = parse_cycles("(0 1)", degree=3)
        assert compose(p, q).images[0] == 2
        assert compose(q, p).images[0] == 1

    @settings(max_examples=60)
    @given(same_degree_pairs(3))
    def test_associativity(self, triple):
        p, q, r = triple
        assert (p * q) * r == p * (q * r)

    @settings(max_examples=60)
    @given(perm_strategy)
    def test_inverse(self, p):
        assert (p * p.inverse()).is_identity()
        assert (p.inverse() * p).is_identity()

    @settings(max_examples=60)
    @given(perm_strategy)
    def test_cycle_text_round_trip(self, p):
        assert parse_cycles(format_cycles(p), degree=p.degree) == p

    @settings(max_examples=60)
    @given(same_degree_pairs(2))
    def test_parity_is_multiplicative(self, pair):
        p, q = pair
        assert (p * q).parity() == (p.parity() + q.parity()) % 2

    def test_parity_known_values(self):
        assert parse_cycles("(0 1)", degree=4).parity() == 1
        assert parse_cycles("(0 1 2)", degree=4).parity() == 0
        assert parse_cycles("(0 1)(2 3)", degree=4).parity() == 0
        assert identity_perm(4).parity() == 0

    def test_parse_rejects_bad_text(self):
        with pytest.raises(ValueError):
            parse_cycles("(0 0 1)")
        with pytest.raises(ValueError):
            parse_cycles("(0 1)(1 2)")
        with pytest.raises(ValueError):
            parse_cycles("0 1 2")
        with pytest.raises(ValueError):
            parse_cycles("(0 5)", degree=3)

    def test_identity_round_trip(self):
        assert format_cycles(identity_perm(5)) == "()"
        assert parse_cycles("()", degree=5) == identity_perm(5)

    def test_order(self):
        assert parse_cycles("(0 1 2)(3 4)", degree=5).order() == 6
        assert identity_perm(3).order() == 1


class TestChain:
    def test_sym5_order(self):
        gens = symmetric_gens(5)
        assert len(brute_elements(gens, 5)) == 120
        assert PermGroup(gens).order() == 120

    def test_alt5_order(self):
        gens = alternating_gens(5)
        assert len(brute_elements(gens, 5)) == 60
        assert PermGroup(gens).order() == 60

    def test_alt6_even_degree_gens(self):
        assert PermGroup(alternating_gens(6)).order() == 360

    def test_membership_matches_brute(self):
        gens = alternating_gens(5)
        inside = brute_elements(gens, 5)
        group = PermGroup(gens)
        assert Permutation((1, 0, 3, 2, 4)) in group
        count = 0
        for images in sorted(inside):
            assert Permutation(images) in group
            count += 1
        assert count == 60
        assert parse_cycles("(0 1)", degree=5) not in group

    def test_trivial_group(self):
        g = PermGroup([], degree=4)
        assert g.order() == 1
        assert list(g.elements()) == [identity_perm(4)]

    def test_elements_enumeration(self):
        group = PermGroup(symmetric_gens(4))
        elems = list(group.elements())
        assert len(elems) == 24
        assert len(set(elems)) == 24
        assert set(e.images for e in elems) == brute_elements(symmetric_gens(4), 4)

    def test_orbit_and_transitivity(self):
        g = PermGroup([parse_cycles("(0 1)(2 3)", degree=4)])
        assert sorted(g.orbit(0)) == [0, 1]
        assert not g.is_transitive()
        assert PermGroup(symmetric_gens(4)).is_transitive()

    def test_determinism(self):
        a = PermGroup(symmetric_gens(6))
        b = PermGroup(symmetric_gens(6))
        assert a.order() == b.order() == 720
        pts_a = [(lv.point, sorted(lv.transversal)) for lv in a._chain()]
        pts_b = [(lv.point, sorted(lv.transversal)) for lv in b._chain()]
        assert pts_a == pts_b


class TestNormalClosure:
    def test_three_cycle_in_sym5(self):
        seeds = [parse_cycles("(0 1 2)", degree=5)]
        gens = symmetric_gens(5)
        expect = brute_normal_closure(seeds, gens, 5)
        assert len(expect) == 60
        nc = PermGroup(gens).normal_closure(seeds)
        assert nc.order() == 60
        assert set(e.images for e in nc.elements()) == expect

    def test_double_transposition_in_sym4(self):
        seeds = [parse_cycles("(0 1)(2 3)", degree=4)]
        gens = symmetric_gens(4)
        expect = brute_normal_closure(seeds, gens, 4)
        assert len(expect) == 4
        nc = PermGroup(gens).normal_closure(seeds)
        assert nc.order() == 4

    def test_derived_subgroup_of_sym4(self):
        assert PermGroup(symmetric_gens(4)).derived_subgroup().order() == 12

    def test_derived_subgroup_of_alt5_is_itself(self):
        assert PermGroup(alternating_gens(5)).derived_subgroup().order() == 60


class TestRecognition:
    def test_symmetric(self):
        assert is_alternating_or_symmetric(PermGroup(symmetric_gens(6))) == "symmetric"

    def test_alternating(self):
        assert is_alternating_or_symmetric(PermGroup(alternating_gens(7))) == "alternating"

    def test_intransitive_is_neither(self):
        g = PermGroup([parse_cycles("(0 1)", degree=4)])
        assert is_alternating_or_symmetric(g) is None

    def test_transitive_proper_subgroup_is_neither(self):
        # Cyclic of order 5 inside Sym(5): transitive, far from Alt(5).
        g = PermGroup([parse_cycles("(0 1 2 3 4)")])
        assert is_alternating_or_symmetric(g) is None

    def test_dihedral_is_neither(self):
        g = PermGroup([parse_cycles("(0 1 2 3 4)"), parse_cycles("(1 4)(2 3)", degree=5)])
        assert g.order() == 10
        assert is_alternating_or_symmetric(g) is None

    def test_order_at_least_sound_on_moderate_degree(self):
        g = PermGroup(alternating_gens(9))
        assert g.order_at_least(math.factorial(9) // 2)
        assert not PermGroup([parse_cycles("(0 1 2 3 4)")]).order_at_least(6)

    def test_order_at_least_never_overshoots(self):
        g = PermGroup(symmetric_gens(5))
        assert g.order_at_least(120)
        assert not g.order_at_least(121)
