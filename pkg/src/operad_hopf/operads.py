"""Set operads: the product eta, factorization enumeration, and primality.

The baseline factorizer enumerates partition x assemblies x outer structures
and keeps the triples mapping onto the target; it is the semantic source.
Instance-specific fast factorizers are accelerators only and are checked
against the baseline in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .errors import LabelMismatch, LabelOverlap
from .structures import (
    ETREE_E,
    ETREE_L,
    E_MONOID,
    EnrichedTree,
    GRAPH,
    Graph,
    L_MONOID,
    LinearOrder,
    MonoidSpecies,
    PGRAPH,
    PSET,
    PTREE,
    PlanarTree,
    PointedGraph,
    PointedSet,
    RootedTree,
    SET,
    SetStruct,
    Species,
    TREE,
    _adjacency,
    _edge,
    connected,
    label_key,
    partitions,
    sorted_labels,
)


@dataclass(frozen=True)
class Assembly:
    """Disjointly-labelled structures; the subjacent partition is their label sets."""

    pieces: tuple

    @staticmethod
    def of(pieces) -> "Assembly":
        pieces = tuple(
            sorted(pieces, key=lambda p: label_key(sorted_labels(p.labels)[0]))
        )
        return Assembly(pieces)

    @property
    def partition(self) -> frozenset:
        return frozenset(p.labels for p in self.pieces)

    @property
    def labels(self) -> frozenset:
        out: frozenset = frozenset()
        for p in self.pieces:
            out |= p.labels
        return out

    def piece_on(self, block: frozenset):
        for p in self.pieces:
            if p.labels == block:
                return p
        raise KeyError(block)

    def __len__(self) -> int:
        return len(self.pieces)


@dataclass(frozen=True)
class Factorization:
    assembly: Assembly
    outer: object  # structure whose labels are the blocks of the assembly


class Operad:
    """A set operad: a species with an associative product eta and unit."""

    name: str
    species: Species

    def eta(self, assembly: Assembly, outer):
        raise NotImplementedError

    def _check_labels(self, assembly: Assembly, outer) -> None:
        if self.species.labels_of(outer) != assembly.partition:
            raise LabelMismatch(
                f"outer labels {outer!r} do not match the assembly partition"
            )

    def singleton_assembly(self, labels) -> Assembly:
        return Assembly.of([self.species.singleton(x) for x in sorted_labels(labels)])

    # -- factorization enumeration -------------------------------------

    def factorizations(
        self,
        m,
        min_blocks: int | None = None,
        exclude_trivial: bool = False,
        fast: bool = True,
    ):
        """All (assembly, outer) with eta(assembly, outer) == m, with filters."""
        n = len(self.species.labels_of(m))
        source = self._fast_factorizations(m) if fast else None
        if source is None:
            source = self.factorizations_brute(m)
        for f in source:
            k = len(f.assembly)
            if min_blocks is not None and k < min_blocks:
                continue
            if exclude_trivial and (k == 1 or k == n):
                continue
            yield f

    def factorizations_brute(self, m):
        """The baseline: partitions x assemblies x outers, filtered by eta == m."""
        sp = self.species
        U = sp.labels_of(m)
        for part in partitions(U):
            blocks = sorted(part, key=lambda b: label_key(sorted_labels(b)[0]))
            pools = [sp.structures(b) for b in blocks]
            for pieces in product(*pools):
                a = Assembly.of(pieces)
                for outer in sp.structures(part):
                    if self.eta(a, outer) == m:
                        yield Factorization(a, outer)

    def _fast_factorizations(self, m):
        return None

    def is_prime(self, m) -> bool:
        """True iff every factorization of ``m`` is trivial."""
        if len(self.species.labels_of(m)) == 1:
            return True
        return next(iter(self.factorizations(m, exclude_trivial=True)), None) is None


# ---------------------------------------------------------------------------
# concrete instances


class EPlusOperad(Operad):
    """Nonempty sets; eta forgets the partition (Faa di Bruno side)."""

    name = "e+"
    species = SET

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        return SetStruct(assembly.labels)

    def _fast_factorizations(self, m):
        for part in partitions(m.labels):
            a = Assembly.of([SetStruct(b) for b in part])
            yield Factorization(a, SetStruct(part))


class EPointOperad(Operad):
    """Pointed sets; the point of the distinguished block survives."""

    name = "e."
    species = PSET

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        return PointedSet(assembly.labels, assembly.piece_on(outer.point).point)

    def _fast_factorizations(self, m):
        for part in partitions(m.labels):
            blocks = sorted(part, key=lambda b: label_key(sorted_labels(b)[0]))
            home = next(b for b in blocks if m.point in b)
            pools = []
            for b in blocks:
                if b == home:
                    pools.append([PointedSet(b, m.point)])
                else:
                    pools.append([PointedSet(b, x) for x in sorted_labels(b)])
            for pieces in product(*pools):
                yield Factorization(Assembly.of(pieces), PointedSet(part, home))


def _is_module(adj: dict, labels: frozenset, block: frozenset) -> bool:
    """All-or-nothing adjacency of outside vertices towards ``block``."""
    for v in labels - block:
        seen = adj[v] & block
        if seen and seen != block:
            return False
    return True


def _induced_edges(edges: frozenset, block: frozenset) -> frozenset:
    return frozenset(e for e in edges if e <= block)


class GrOperad(Operad):
    """Simple connected graphs; outer edges become complete joins."""

    name = "gr"
    species = GRAPH

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        edges = set()
        for p in assembly.pieces:
            edges |= p.edges
        for e in outer.edges:
            b1, b2 = tuple(e)
            edges |= {_edge(u, v) for u in b1 for v in b2}
        return Graph(assembly.labels, frozenset(edges))

    def _fast_factorizations(self, m):
        adj = _adjacency(m.labels, m.edges)
        for part in partitions(m.labels):
            pieces = []
            ok = True
            for b in part:
                inner = _induced_edges(m.edges, b)
                if not connected(b, inner) or not _is_module(adj, m.labels, b):
                    ok = False
                    break
                pieces.append(Graph(b, inner))
            if not ok:
                continue
            blocks = sorted(part, key=lambda x: label_key(sorted_labels(x)[0]))
            qedges = set()
            for b1, b2 in combinations(blocks, 2):
                if any(adj[u] & b2 for u in b1):
                    qedges.add(_edge(b1, b2))
            yield Factorization(Assembly.of(pieces), Graph(part, frozenset(qedges)))


class GrpOperad(Operad):
    """Pointed connected graphs; outer edges join the distinguished vertices."""

    name = "grp"
    species = PGRAPH

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        edges = set()
        for p in assembly.pieces:
            edges |= p.edges
        for e in outer.edges:
            b1, b2 = tuple(e)
            edges.add(_edge(assembly.piece_on(b1).point, assembly.piece_on(b2).point))
        return PointedGraph(
            assembly.labels, frozenset(edges), assembly.piece_on(outer.point).point
        )

    def _fast_factorizations(self, m):
        for part in partitions(m.labels):
            blocks = sorted(part, key=lambda x: label_key(sorted_labels(x)[0]))
            block_of = {v: b for b in blocks for v in b}
            external: dict = {b: set() for b in blocks}
            qedges = set()
            ok = True
            for e in m.edges:
                u, v = tuple(e)
                bu, bv = block_of[u], block_of[v]
                if bu != bv:
                    external[bu].add(u)
                    external[bv].add(v)
                    qedges.add(_edge(bu, bv))
            points = {}
            for b in blocks:
                inner = _induced_edges(m.edges, b)
                if not connected(b, inner):
                    ok = False
                    break
                if len(external[b]) > 1:
                    ok = False
                    break
                if external[b]:
                    points[b] = next(iter(external[b]))
                else:
                    # only possible for the one-block partition
                    points[b] = m.point
            if not ok:
                continue
            home = block_of[m.point]
            if points[home] != m.point:
                continue
            pieces = [
                PointedGraph(b, _induced_edges(m.edges, b), points[b]) for b in blocks
            ]
            yield Factorization(
                Assembly.of(pieces), PointedGraph(part, frozenset(qedges), home)
            )


def _anchored_subsets(tree: RootedTree):
    """Ancestor-closed vertex subsets containing the root."""
    verts = sorted_labels(tree.labels)
    parent = tree.parent_map
    for bits in range(1 << len(verts)):
        W = {verts[i] for i in range(len(verts)) if bits >> i & 1}
        if tree.root not in W:
            continue
        if all(v == tree.root or parent[v] in W for v in W):
            yield W


def _tree_pieces(tree: RootedTree, W: set) -> dict:
    """Map each w in W to the vertex set hanging under it outside W."""
    anchor: dict = {}

    def find(v):
        if v in W:
            return v
        if v not in anchor:
            anchor[v] = find(tree.parent_map[v])
        return anchor[v]

    pieces: dict = {w: {w} for w in W}
    for v in sorted_labels(tree.labels):
        pieces[find(v)].add(v)
    return pieces


class ArbOperad(Operad):
    """Rooted trees (the NAP product): join the roots along the outer tree."""

    name = "arb"
    species = TREE

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        roots = {p.labels: p.root for p in assembly.pieces}
        parent: dict = {}
        for p in assembly.pieces:
            parent.update(p.parent_map)
        for child_block, parent_block in outer.parent_map.items():
            parent[roots[child_block]] = roots[parent_block]
        return RootedTree.of(roots[outer.root], parent)

    def _fast_factorizations(self, m):
        for W in _anchored_subsets(m):
            piece_sets = _tree_pieces(m, W)
            pieces = {
                w: RootedTree.of(
                    w, {v: m.parent_map[v] for v in vs if v != w}
                )
                for w, vs in piece_sets.items()
            }
            block = {w: frozenset(vs) for w, vs in piece_sets.items()}
            outer = RootedTree.of(
                block[m.root],
                {block[w]: block[m.parent_map[w]] for w in W if w != m.root},
            )
            yield Factorization(Assembly.of(pieces.values()), outer)


class ArbLOperad(Operad):
    """Planar rooted trees; merged fibers concatenate inner order then outer order."""

    name = "arb-l"
    species = PTREE

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        roots = {p.labels: p.root for p in assembly.pieces}
        order: dict = {}
        for p in assembly.pieces:
            order.update(p.order_map)
        for b in outer.labels:
            extra = tuple(roots[c] for c in outer.fiber_order(b))
            if extra:
                r = roots[b]
                order[r] = order.get(r, ()) + extra
        return PlanarTree.of(roots[outer.root], order)

    def _fast_factorizations(self, m):
        rooted = m.to_rooted()
        for W in _anchored_subsets(rooted):
            ok = True
            for w in W:
                fiber = m.fiber_order(w)
                flags = [c in W for c in fiber]
                # inner children must be a prefix, outer children the suffix
                if any(a and not b for a, b in zip(flags, flags[1:])):
                    ok = False
                    break
            if not ok:
                continue
            piece_sets = _tree_pieces(rooted, W)
            block = {w: frozenset(vs) for w, vs in piece_sets.items()}
            pieces = []
            for w, vs in piece_sets.items():
                order = {
                    v: tuple(c for c in m.fiber_order(v) if c in vs)
                    for v in vs
                }
                pieces.append(PlanarTree.of(w, order))
            outer_order = {
                block[w]: tuple(block[c] for c in m.fiber_order(w) if c in W)
                for w in W
            }
            outer = PlanarTree.of(block[rooted.root], outer_order)
            yield Factorization(Assembly.of(pieces), outer)


class ArbNOperad(Operad):
    """Trees enriched by a monoid species N; fibers merge through nu at the roots."""

    def __init__(self, monoid: MonoidSpecies):
        self.monoid = monoid
        self.name = f"arb-n-{monoid.name.lower()}"
        self.species = ETREE_E if monoid is E_MONOID else ETREE_L

    def eta(self, assembly, outer):
        self._check_labels(assembly, outer)
        N = self.monoid
        roots = {p.labels: p.root for p in assembly.pieces}
        parent: dict = {}
        enrich: dict = {}
        for p in assembly.pieces:
            parent.update(p.tree.parent_map)
            enrich.update(p.enrich_map)
        for child_block, parent_block in outer.tree.parent_map.items():
            parent[roots[child_block]] = roots[parent_block]
        for b, n_outer in outer.enrich_map.items():
            r = roots[b]
            relabelled = N.relabel(n_outer, {c: roots[c] for c in n_outer.labels})
            inner = enrich.get(r, N.empty())
            enrich[r] = N.nu(inner, relabelled)
        return EnrichedTree.of(N.name, roots[outer.root], parent, enrich)


def nu_bar(monoid: MonoidSpecies, items: tuple):
    """Right-nested fold of the monoid product over disjoint structures."""
    items = tuple(items)
    if not items:
        return monoid.empty()
    total = 0
    union: frozenset = frozenset()
    for n in items:
        total += len(n.labels)
        union |= n.labels
    if len(union) != total:
        raise LabelOverlap("structures passed to nu_bar overlap")
    if len(items) == 1:
        return items[0]
    return monoid.nu(items[0], nu_bar(monoid, items[1:]))


EPLUS = EPlusOperad()
EPOINT = EPointOperad()
GR = GrOperad()
GRP = GrpOperad()
ARB = ArbOperad()
ARB_L = ArbLOperad()
ARB_N_E = ArbNOperad(E_MONOID)
ARB_N_L = ArbNOperad(L_MONOID)

#: the six concrete operads of the paper's examples
SIX_OPERADS = (EPLUS, EPOINT, GR, GRP, ARB, ARB_L)

OPERADS = {
    "e+": EPLUS,
    "eplus": EPLUS,
    "e.": EPOINT,
    "e*": EPOINT,
    "epoint": EPOINT,
    "gr": GR,
    "grp": GRP,
    "arb": ARB,
    "nap": ARB,
    "arb-l": ARB_L,
    "planar": ARB_L,
    "arb-n-e": ARB_N_E,
    "arb-n-l": ARB_N_L,
}


def get_operad(name: str) -> Operad:
    try:
        return OPERADS[name.lower()]
    except KeyError:
        raise KeyError(
            f"unknown operad {name!r}; choose from "
            + ", ".join(sorted(set(OPERADS)))
        ) from None
