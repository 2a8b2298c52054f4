"""Finite groups as multiplication tables, and the semidirect product S = U . A.

Every group here is a table group: elements are the indices 0..order-1 with
index 0 the identity, and multiplication is a materialized order x order
table.  The ambient group of the whole pipeline, S = U semidirect A with U
homocyclic of exponent e and rank 2|A| (A permuting the coordinates of two
copies of its own regular action), is built by SGroup as a table group with
codecs between indices and (vector, A-element) pairs.

Desk scale is enforced: subgroup enumeration materializes full element
tuples, and the configurable caps raise ScaleError rather than thrash.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .permcore import Permutation


class ScaleError(RuntimeError):
    """A configured desk-scale bound was exceeded; names the bound."""

    def __init__(self, bound_name: str, bound_value, actual):
        self.bound_name = bound_name
        self.bound_value = bound_value
        self.actual = actual
        super().__init__(
            "scale bound %s=%s exceeded (needed %s)" % (bound_name, bound_value, actual)
        )


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of a table group: full sorted element tuple plus generators."""

    elements: tuple[int, ...]
    generators: tuple[int, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.elements))) != self.elements:
            raise ValueError("subgroup elements must be sorted and deduplicated")

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def key(self) -> tuple[int, ...]:
        return self.elements

    def __contains__(self, x: int) -> bool:
        return x in self.element_set

    @property
    def element_set(self) -> frozenset:
        # cached on first use; object.__setattr__ because frozen
        try:
            return object.__getattribute__(self, "_eset")
        except AttributeError:
            es = frozenset(self.elements)
            object.__setattr__(self, "_eset", es)
            return es


class FiniteGroup:
    """A finite group given by its multiplication table, identity at index 0."""

    def __init__(self, table: Sequence[Sequence[int]], name: str = "", validate: bool = False):
        if isinstance(table, np.ndarray):
            self._np_table = table.astype(np.int64)
            self.table = table.tolist()
        else:
            self.table = [list(row) for row in table]
            self._np_table = np.array(self.table, dtype=np.int64)
        self.order = len(self.table)
        self.name = name
        if any(len(row) != self.order for row in self.table):
            raise ValueError("multiplication table is not square")
        if validate:
            self._validate()
        row0 = self.table[0]
        if row0 != list(range(self.order)) or [r[0] for r in self.table] != list(range(self.order)):
            raise ValueError("index 0 is not a two-sided identity")
        self.inverse = [0] * self.order
        for i, row in enumerate(self.table):
            self.inverse[row.index(0)] = i
        self._order_cache: dict[int, int] = {}

    def _validate(self) -> None:
        n = self.order
        for row in self.table:
            if sorted(row) != list(range(n)):
                raise ValueError("table row is not a permutation of the elements")
        cols = list(zip(*self.table))
        for col in cols:
            if sorted(col) != list(range(n)):
                raise ValueError("table column is not a permutation of the elements")
        if n > 512:
            raise ScaleError("table_validation_order", 512, n)
        t = self.table
        for a in range(n):
            ta = t[a]
            for b in range(n):
                tab = ta[b]
                tb = t[b]
                for c in range(n):
                    if t[tab][c] != ta[tb[c]]:
                        raise ValueError(
                            "associativity fails at (%d, %d, %d)" % (a, b, c)
                        )

    # -- element arithmetic ------------------------------------------------

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def conj(self, g: int, x: int) -> int:
        """Left-handed conjugation g x g^-1."""
        return self.table[self.table[g][x]][self.inverse[g]]

    def product(self, xs: Iterable[int]) -> int:
        acc = 0
        for x in xs:
            acc = self.table[acc][x]
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            return self.power(self.inverse[a], -k)
        acc = 0
        for _ in range(k):
            acc = self.table[acc][a]
        return acc

    def element_order(self, a: int) -> int:
        cached = self._order_cache.get(a)
        if cached is not None:
            return cached
        k, x = 1, a
        while x != 0:
            x = self.table[x][a]
            k += 1
        self._order_cache[a] = k
        return k

    def exponent(self) -> int:
        exp = 1
        for a in range(self.order):
            o = self.element_order(a)
            exp = exp * o // _gcd(exp, o)
        return exp

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def commutator(self, a: int, b: int) -> int:
        """[a, b] = a b a^-1 b^-1."""
        t = self.table
        return t[t[t[a][b]][self.inverse[a]]][self.inverse[b]]

    # -- subgroup machinery -------------------------------------------------

    def closure(self, seed: Iterable[int]) -> tuple[int, ...]:
        """Sorted element tuple of the subgroup generated by the seed."""
        seen = {0}
        queue = [0]
        gens = sorted(set(seed))
        t = self.table
        for x in queue:
            for g in gens:
                y = t[x][g]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return tuple(sorted(seen))

    def subgroup(self, gens: Iterable[int]) -> Subgroup:
        gens = tuple(sorted(set(gens) - {0}))
        return Subgroup(self.closure(gens), gens)

    def trivial_subgroup(self) -> Subgroup:
        return Subgroup((0,), ())

    def full_subgroup(self) -> Subgroup:
        return Subgroup(tuple(range(self.order)), tuple(self.minimal_generators()))

    def minimal_generators(self) -> list[int]:
        """A short (not necessarily minimum) generating list, greedily built."""
        gens: list[int] = []
        cur = (0,)
        for a in sorted(range(self.order), key=lambda x: -self.element_order(x)):
            if a not in cur:
                gens.append(a)
                cur = self.closure(gens)
                if len(cur) == self.order:
                    break
        return gens

    def all_subgroups(self, max_count: Optional[int] = None) -> list[Subgroup]:
        """Every subgroup, found by closing each known subgroup with one more
        element; complete because any subgroup is reachable by adding
        generators one at a time.  Sorted by (order, elements)."""
        found: dict[tuple[int, ...], tuple[int, ...]] = {(0,): ()}
        queue = [(0,)]
        for elems in queue:
            base_gens = found[elems]
            for g in range(1, self.order):
                if g in elems:
                    continue
                gens = tuple(sorted(set(base_gens) | {g}))
                new = self.closure(gens)
                if new not in found:
                    found[new] = gens
                    if max_count is not None and len(found) > max_count:
                        raise ScaleError("max_subgroups", max_count, len(found))
                    queue.append(new)
        subs = [Subgroup(elems, gens) for elems, gens in found.items()]
        subs.sort(key=lambda h: (h.order, h.elements))
        return subs

    def centralizer(self, elements: Iterable[int], within: Optional[Iterable[int]] = None) -> Subgroup:
        pool = range(self.order) if within is None else within
        elems = list(elements)
        t = self.table
        cent = [g for g in pool if all(t[g][x] == t[x][g] for x in elems)]
        return Subgroup(tuple(sorted(cent)), tuple(sorted(cent)))

    def normalizer(self, sub: Subgroup, within: Optional[Iterable[int]] = None) -> Subgroup:
        pool = range(self.order) if within is None else within
        eset = sub.element_set
        norm = [g for g in pool if all(self.conj(g, x) in eset for x in sub.elements)]
        return Subgroup(tuple(sorted(norm)), tuple(sorted(norm)))

    def center(self) -> Subgroup:
        return self.centralizer(range(self.order))

    def commutator_subgroup(self) -> Subgroup:
        comms = set()
        for a in range(self.order):
            for b in range(a):
                comms.add(self.commutator(a, b))
        comms.discard(0)
        return self.subgroup(comms)

    def conjugate_subgroup(self, g: int, sub: Subgroup) -> Subgroup:
        elems = tuple(sorted(self.conj(g, x) for x in sub.elements))
        gens = tuple(sorted(self.conj(g, x) for x in sub.generators))
        return Subgroup(elems, gens)

    def join(self, a: Subgroup, b: Subgroup) -> Subgroup:
        return self.subgroup(set(a.elements) | set(b.elements))

    def intersect(self, a: Subgroup, b: Subgroup) -> Subgroup:
        common = tuple(sorted(set(a.elements) & set(b.elements)))
        return Subgroup(common, tuple(x for x in common if x != 0))

    def table_hash(self) -> str:
        payload = repr(self.table).encode()
        return hashlib.sha256(payload).hexdigest()

    # -- constructions ------------------------------------------------------

    @classmethod
    def from_permutations(cls, perms: Sequence[Permutation], name: str = "") -> tuple["FiniteGroup", list[Permutation]]:
        """Table group of the permutation group generated by perms, elements
        listed BFS from the identity; returns (group, element list)."""
        degree = max(p.degree for p in perms)
        perms = [p.extended(degree) if p.degree < degree else p for p in perms]
        ident = tuple(range(degree))
        index = {ident: 0}
        elems = [ident]
        for cur in elems:
            for p in perms:
                nxt = tuple(cur[j] for j in p.images)
                if nxt not in index:
                    index[nxt] = len(elems)
                    elems.append(nxt)
        n = len(elems)
        table = [[0] * n for _ in range(n)]
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                table[i][j] = index[tuple(a[x] for x in b)]
        return cls(table, name=name), [Permutation(e) for e in elems]

    def direct_product(self, other: "FiniteGroup") -> "FiniteGroup":
        """Product group; element index = self_index * |other| + other_index."""
        n, m = self.order, other.order
        table = [[0] * (n * m) for _ in range(n * m)]
        for a1 in range(n):
            for a2 in range(m):
                i = a1 * m + a2
                row = table[i]
                ta, tb = self.table[a1], other.table[a2]
                for b1 in range(n):
                    tab1 = ta[b1] * m
                    base = b1 * m
                    for b2 in range(m):
                        row[base + b2] = tab1 + tb[b2]
        name = "%sx%s" % (self.name, other.name) if self.name and other.name else ""
        return FiniteGroup(table, name=name)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# -- the small-group catalog --------------------------------------------------


def _cyclic(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], name="C%d" % n)


def _dihedral(order: int) -> FiniteGroup:
    # element 2i = rotation^i, 2i+1 = rotation^i * reflection
    if order % 2 or order < 2:
        raise ValueError("dihedral groups here have even order >= 2, got %d" % order)
    n = order // 2
    table = [[0] * order for _ in range(order)]
    for i in range(n):
        for j in range(n):
            table[2 * i][2 * j] = 2 * ((i + j) % n)
            table[2 * i][2 * j + 1] = 2 * ((i + j) % n) + 1
            table[2 * i + 1][2 * j] = 2 * ((i - j) % n) + 1
            table[2 * i + 1][2 * j + 1] = 2 * ((i - j) % n)
    return FiniteGroup(table, name="D%d" % order)


def _symmetric(n: int) -> FiniteGroup:
    if n > 4:
        raise ValueError("catalog symmetric groups stop at S4 (got S%d)" % n)
    if n <= 1:
        return _cyclic(1)
    perms = [list(p) for p in itertools.permutations(range(n))]
    perms.sort()
    # identity is lexicographically first, so index 0 is right already
    index = {tuple(p): i for i, p in enumerate(perms)}
    table = [[index[tuple(a[x] for x in b)] for b in perms] for a in perms]
    return FiniteGroup(table, name="S%d" % n)


_Q8_TABLE = [
    # 0:1, 1:-1, 2:i, 3:-i, 4:j, 5:-j, 6:k, 7:-k
    [0, 1, 2, 3, 4, 5, 6, 7],
    [1, 0, 3, 2, 5, 4, 7, 6],
    [2, 3, 1, 0, 6, 7, 5, 4],
    [3, 2, 0, 1, 7, 6, 4, 5],
    [4, 5, 7, 6, 1, 0, 2, 3],
    [5, 4, 6, 7, 0, 1, 3, 2],
    [6, 7, 4, 5, 3, 2, 1, 0],
    [7, 6, 5, 4, 2, 3, 0, 1],
]


def catalog_group(name: str) -> FiniteGroup:
    """Catalog lookup: "1", "C<n>", "D<2n>", "S<n>" (n <= 4), "Q8", and
    "x"-separated direct products such as "C2xC2"."""
    name = name.strip()
    if "x" in name:
        parts = name.split("x")
        group = catalog_group(parts[0])
        for part in parts[1:]:
            group = group.direct_product(catalog_group(part))
        group.name = name
        return group
    if name == "1":
        return FiniteGroup([[0]], name="1")
    if name == "Q8":
        return FiniteGroup(_Q8_TABLE, name="Q8")
    if name.startswith("C") and name[1:].isdigit():
        n = int(name[1:])
        if n < 1:
            raise ValueError("bad cyclic order in %r" % name)
        return _cyclic(n)
    if name.startswith("D") and name[1:].isdigit():
        return _dihedral(int(name[1:]))
    if name.startswith("S") and name[1:].isdigit():
        return _symmetric(int(name[1:]))
    raise ValueError("unknown catalog group %r" % name)


def load_table_file(path: str, name: str = "custom") -> FiniteGroup:
    """Read a group from a text file: first token is the order, then the
    row-major multiplication table.  The identity is relabeled to index 0."""
    with open(path) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError("empty group file %r" % path)
    n = int(tokens[0])
    body = [int(x) for x in tokens[1:]]
    if len(body) != n * n:
        raise ValueError("expected %d table entries, found %d" % (n * n, len(body)))
    if any(not 0 <= x < n for x in body):
        raise ValueError("table entry out of range in %r" % path)
    table = [body[i * n:(i + 1) * n] for i in range(n)]
    ident = None
    for e in range(n):
        if table[e] == list(range(n)) and all(table[x][e] == x for x in range(n)):
            ident = e
            break
    if ident is None:
        raise ValueError("table has no two-sided identity")
    if ident != 0:
        relabel = list(range(n))
        relabel[0], relabel[ident] = ident, 0
        table = [
            [relabel[table[relabel[a]][relabel[b]]] for b in range(n)]
            for a in range(n)
        ]
    return FiniteGroup(table, name=name, validate=True)


@dataclass
class InputGroupA:
    """The group to realize, with its exponent."""

    name: str
    group: FiniteGroup
    e: int = field(init=False)

    def __post_init__(self):
        self.e = self.group.exponent()

    @property
    def order(self) -> int:
        return self.group.order

    @classmethod
    def from_name(cls, name: str) -> "InputGroupA":
        return cls(name, catalog_group(name))

    @classmethod
    def from_file(cls, path: str) -> "InputGroupA":
        return cls("custom", load_table_file(path))


# -- the ambient group S = U . A ----------------------------------------------


class SGroup(FiniteGroup):
    """S = U semidirect A: U = (Z/e)^(2|A|), A permuting the coordinates of two
    copies of its left-translation action.  Element index = vector rank (big-
    endian base e) * |A| + A-index, which is the lexicographic (vector, A) order."""

    def __init__(self, A: InputGroupA, max_order: int = 4096):
        self.A = A
        self.e = A.e
        a_order = A.order
        self.rank = 2 * a_order
        u_order = self.e ** self.rank
        s_order = u_order * a_order
        if s_order > max_order:
            raise ScaleError("max_subgroup_order", max_order, s_order)
        self.u_order = u_order

        # coordinate permutations: coordinate (copy, x) sits at copy*|A| + x,
        # and a sends it to copy*|A| + (a x)
        self.coord_perm = []
        for a in range(a_order):
            perm = [0] * self.rank
            for copy in range(2):
                for x in range(a_order):
                    perm[copy * a_order + A.group.mul(a, x)] = copy * a_order + x
            # perm is laid out so that (a.v)[c] = v[perm[c]]
            self.coord_perm.append(perm)

        table = self._build_table(a_order, u_order)
        super().__init__(table, name="S(%s)" % A.name)

    def _build_table(self, a_order: int, u_order: int) -> np.ndarray:
        e, rank = self.e, self.rank
        weights = np.array([e ** (rank - 1 - i) for i in range(rank)], dtype=np.int64)
        vecs = np.zeros((u_order, rank), dtype=np.int64)
        r = np.arange(u_order)
        for i in range(rank):
            vecs[:, i] = (r // int(weights[i])) % e
        a_table = np.array(self.A.group.table, dtype=np.int64)

        table = np.zeros((u_order * a_order, u_order * a_order), dtype=np.int64)
        for a in range(a_order):
            perm = np.array(self.coord_perm[a], dtype=np.int64)
            acted = vecs[:, perm]                  # row v -> a.v
            for u_rank in range(u_order):
                u = vecs[u_rank]
                summed = (u[np.newaxis, :] + acted) % e
                res_rank = summed @ weights        # (u + a.v) for every v
                for b in range(a_order):
                    row = u_rank * a_order + a
                    table[row, np.arange(u_order) * a_order + b] = (
                        res_rank * a_order + a_table[a, b]
                    )
        return table

    # -- codecs ---------------------------------------------------------------

    def encode(self, u_vec: Sequence[int], a_idx: int) -> int:
        rank = 0
        for v in u_vec:
            rank = rank * self.e + (v % self.e)
        return rank * self.A.order + a_idx

    def decode(self, idx: int) -> tuple[tuple[int, ...], int]:
        a_idx = idx % self.A.order
        rank = idx // self.A.order
        vec = [0] * self.rank
        for i in range(self.rank - 1, -1, -1):
            vec[i] = rank % self.e
            rank //= self.e
        return tuple(vec), a_idx

    def format_element(self, idx: int) -> str:
        vec, a = self.decode(idx)
        return "(%s; %d)" % (" ".join(str(v) for v in vec), a)

    def parse_element(self, text: str) -> int:
        text = text.strip()
        if not (text.startswith("(") and text.endswith(")")):
            raise ValueError("bad element literal %r" % text)
        left, _, right = text[1:-1].partition(";")
        vec = [int(x) for x in left.split()]
        if len(vec) != self.rank:
            raise ValueError("expected %d coordinates in %r" % (self.rank, text))
        return self.encode(vec, int(right))

    # -- distinguished subgroups ------------------------------------------------

    def U_subgroup(self) -> Subgroup:
        elems = tuple(sorted(r * self.A.order for r in range(self.u_order)))
        gens = tuple(
            self.encode([1 if i == j else 0 for i in range(self.rank)], 0)
            for j in range(self.rank)
        )
        return Subgroup(elems, gens)

    def fixed_subgroup(self) -> Subgroup:
        """C_U(A): vectors constant on each copy of the regular coordinates."""
        a_order = self.A.order
        elems = []
        for c in range(self.e):
            for d in range(self.e):
                vec = [c] * a_order + [d] * a_order
                elems.append(self.encode(vec, 0))
        gens = (
            self.encode([1] * a_order + [0] * a_order, 0),
            self.encode([0] * a_order + [1] * a_order, 0),
        )
        return Subgroup(tuple(sorted(elems)), gens)

    def Z_subgroup(self, copy: int) -> Subgroup:
        """Z_1 or Z_2: the diagonal cyclic C_e of one copy."""
        a_order = self.A.order
        vec_one = [1 if (i // a_order) == copy else 0 for i in range(self.rank)]
        return self.subgroup([self.encode(vec_one, 0)])


def build_S(A: InputGroupA, max_order: int = 4096) -> SGroup:
    """The ambient group of the construction for input A."""
    return SGroup(A, max_order=max_order)


def enumerate_subgroups(S: FiniteGroup, max_order: int = 4096, max_count: int = 20000) -> list[Subgroup]:
    if S.order > max_order:
        raise ScaleError("max_subgroup_order", max_order, S.order)
    return S.all_subgroups(max_count=max_count)


def homocyclic_rank2(S: SGroup, subgroups: Optional[list[Subgroup]] = None) -> list[Subgroup]:
    """All V <= S with V isomorphic to C_e x C_e, each with a fixed generating
    pair (first pair of order-e elements in index order that splits V)."""
    e = S.e
    if e == 1:
        return []
    target = e * e
    if subgroups is None:
        subgroups = S.all_subgroups()
    out = []
    for sub in subgroups:
        if sub.order != target:
            continue
        if any(S.element_order(x) not in _divisors_cache(e) for x in sub.elements):
            continue
        if max(S.element_order(x) for x in sub.elements) != e:
            continue
        if not all(S.mul(a, b) == S.mul(b, a) for a in sub.elements for b in sub.elements):
            continue
        pair = _splitting_pair(S, sub, e)
        if pair is None:
            continue
        out.append(Subgroup(sub.elements, pair))
    return out


def _divisors_cache(e: int) -> frozenset:
    return frozenset(d for d in range(1, e + 1) if e % d == 0)


def _splitting_pair(S: FiniteGroup, sub: Subgroup, e: int) -> Optional[tuple[int, int]]:
    order_e = [x for x in sub.elements if S.element_order(x) == e]
    for g in order_e:
        span_g = set(S.closure([g]))
        for h in order_e:
            if h <= g:
                continue
            if set(S.closure([h])) & span_g != {0}:
                continue
            if len(S.closure([g, h])) == sub.order:
                return (g, h)
    return None


def automorphisms_of(G: FiniteGroup, V: Subgroup) -> list[dict[int, int]]:
    """Aut(V) as maps on element indices, for V homocyclic of rank <= 2 or any
    V small enough for the generic generator-image search."""
    if V.order == 1:
        return [{0: 0}]
    e = max(G.element_order(x) for x in V.elements)
    abelian = all(G.mul(a, b) == G.mul(b, a) for a in V.elements for b in V.elements)
    if abelian and V.order == e * e and _splitting_pair(G, V, e) is not None:
        return _homocyclic2_automorphisms(G, V, e)
    return _generic_automorphisms(G, V)


def _homocyclic2_automorphisms(G: FiniteGroup, V: Subgroup, e: int) -> list[dict[int, int]]:
    g, h = _splitting_pair(G, V, e)
    # coordinates of every element in the internal direct decomposition <g> x <h>
    coords = {}
    for i in range(e):
        gi = G.power(g, i)
        for j in range(e):
            coords[G.mul(gi, G.power(h, j))] = (i, j)
    order_e = [x for x in V.elements if G.element_order(x) == e]
    autos = []
    for g2 in order_e:
        span2 = set(G.closure([g2]))
        for h2 in order_e:
            if set(G.closure([h2])) & span2 != {0}:
                continue
            if len(G.closure([g2, h2])) != V.order:
                continue
            table = {}
            for x in V.elements:
                i, j = coords[x]
                table[x] = G.mul(G.power(g2, i), G.power(h2, j))
            autos.append(table)
    autos.sort(key=lambda t: tuple(t[x] for x in V.elements))
    return autos


def _generic_automorphisms(G: FiniteGroup, V: Subgroup) -> list[dict[int, int]]:
    gens = list(V.generators) or [x for x in V.elements if x != 0][:1]
    if not gens:
        return [{0: 0}]
    if tuple(G.closure(gens)) != V.elements:
        gens = _greedy_generators(G, V)
    elems = list(V.elements)
    by_order: dict[int, list[int]] = {}
    for x in elems:
        by_order.setdefault(G.element_order(x), []).append(x)
    out: list[dict[int, int]] = []

    def extend(k: int, images: list[int]):
        if k == len(gens):
            table = _hom_table(G, V, gens, images)
            if table is not None and len(set(table.values())) == V.order:
                out.append(table)
            return
        for cand in by_order[G.element_order(gens[k])]:
            images.append(cand)
            if _partial_consistent(G, V, gens[: k + 1], images):
                extend(k + 1, images)
            images.pop()

    extend(0, [])
    dedup = {tuple(t[x] for x in V.elements): t for t in out}
    return [dedup[k] for k in sorted(dedup)]


def _greedy_generators(G: FiniteGroup, V: Subgroup) -> list[int]:
    gens: list[int] = []
    cur = (0,)
    for x in sorted(V.elements, key=lambda y: -G.element_order(y)):
        if x not in cur:
            gens.append(x)
            cur = G.closure(gens)
            if cur == V.elements:
                break
    return gens


def _word_map(G: FiniteGroup, gens: Sequence[int]) -> dict[int, tuple[int, ...]]:
    """Each element of <gens> as one fixed word in the generators."""
    words = {0: ()}
    queue = [0]
    for x in queue:
        for gi, g in enumerate(gens):
            y = G.mul(x, g)
            if y not in words:
                words[y] = words[x] + (gi,)
                queue.append(y)
    return words


def _hom_table(G: FiniteGroup, V: Subgroup, gens: Sequence[int], images: Sequence[int]) -> Optional[dict[int, int]]:
    words = _word_map(G, gens)
    if len(words) != V.order:
        return None
    table = {}
    for x, word in words.items():
        table[x] = G.product(images[gi] for gi in word)
    for a in V.elements:
        for b in V.elements:
            if table[G.mul(a, b)] != G.mul(table[a], table[b]):
                return None
    return table


def _partial_consistent(G: FiniteGroup, V: Subgroup, gens: Sequence[int], images: Sequence[int]) -> bool:
    # cheap pruning: the assigned images must satisfy every relation that the
    # current generator prefix satisfies on a bounded product sample
    for i in range(len(gens)):
        for j in range(len(gens)):
            lhs = G.mul(gens[i], gens[j])
            rhs = G.mul(images[i], images[j])
            if G.element_order(lhs) != G.element_order(rhs):
                return False
    return True


def find_isomorphism(G1: FiniteGroup, G2: FiniteGroup) -> Optional[dict[int, int]]:
    """A table isomorphism G1 -> G2, or None; generator-image backtracking."""
    if G1.order != G2.order:
        return None
    prof1 = sorted(G1.element_order(x) for x in range(G1.order))
    prof2 = sorted(G2.element_order(x) for x in range(G2.order))
    if prof1 != prof2:
        return None
    gens = _greedy_generators(G1, G1.full_subgroup())
    words = _word_map(G1, gens)
    by_order: dict[int, list[int]] = {}
    for x in range(G2.order):
        by_order.setdefault(G2.element_order(x), []).append(x)

    def extend(k: int, images: list[int]) -> Optional[dict[int, int]]:
        if k == len(gens):
            table = {x: G2.product(images[gi] for gi in word) for x, word in words.items()}
            if len(set(table.values())) != G1.order:
                return None
            for a in range(G1.order):
                for b in range(G1.order):
                    if table[G1.mul(a, b)] != G2.mul(table[a], table[b]):
                        return None
            return table
        for cand in by_order.get(G1.element_order(gens[k]), []):
            images.append(cand)
            ok = True
            for i in range(k + 1):
                if G2.element_order(G2.mul(images[i], cand)) != G1.element_order(G1.mul(gens[i], gens[k])):
                    ok = False
                    break
            if ok:
                res = extend(k + 1, images)
                if res is not None:
                    return res
            images.pop()
        return None

    return extend(0, [])


def are_isomorphic(G1: FiniteGroup, G2: FiniteGroup) -> bool:
    return find_isomorphism(G1, G2) is not None
