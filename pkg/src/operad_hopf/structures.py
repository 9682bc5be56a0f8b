"""Labelled structures for every species used, canonical forms, enumeration.

Labels are opaque hashable atoms (ints, strings, frozensets of labels when
blocks of a partition act as labels, ...); all semantics flow through
bijections.  Each species object knows how to enumerate all structures on a
label set, compute an isomorphism-invariant canonical byte string, and
relabel along a bijection.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations, product

from .algebra import TypeKey
from .errors import ParseError, ShapeMismatch, SizeCapExceeded

# ---------------------------------------------------------------------------
# labels and size caps

DEFAULT_CAP = 8
GRAPH_CAP = 6


def label_key(x):
    """Total order key across mixed label atoms (ints, strings, frozensets, tuples)."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, frozenset):
        return (2, tuple(sorted(label_key(y) for y in x)))
    if isinstance(x, tuple):
        return (3, tuple(label_key(y) for y in x))
    return (4, repr(x))


def sorted_labels(labels):
    return sorted(labels, key=label_key)


def size_cap(tag: str, cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get("OPERAD_HOPF_MAX_N")
    if env:
        return int(env)
    return GRAPH_CAP if tag in ("graph", "pgraph") else DEFAULT_CAP


def check_cap(n: int, tag: str, cap: int | None = None) -> None:
    limit = size_cap(tag, cap)
    if n > limit:
        raise SizeCapExceeded(n, limit)


# ---------------------------------------------------------------------------
# structure types


@dataclass(frozen=True)
class SetStruct:
    labels: frozenset


@dataclass(frozen=True)
class PointedSet:
    labels: frozenset
    point: object


def _edge(u, v) -> frozenset:
    return frozenset((u, v))


@dataclass(frozen=True)
class Graph:
    """Simple connected graph; edges are 2-element frozensets."""

    labels: frozenset
    edges: frozenset


@dataclass(frozen=True)
class PointedGraph:
    labels: frozenset
    edges: frozenset
    point: object


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree given by its root and child -> parent pairs (sorted)."""

    root: object
    parent: tuple

    @staticmethod
    def of(root, parent_map: dict) -> "RootedTree":
        items = tuple(sorted(parent_map.items(), key=lambda kv: label_key(kv[0])))
        return RootedTree(root, items)

    @cached_property
    def labels(self) -> frozenset:
        return frozenset((self.root,)) | frozenset(v for v, _ in self.parent)

    @cached_property
    def parent_map(self) -> dict:
        return dict(self.parent)

    @cached_property
    def children_map(self) -> dict:
        out = {v: [] for v in sorted_labels(self.labels)}
        for child, par in self.parent:
            out[par].append(child)
        for v in out:
            out[v] = sorted(out[v], key=label_key)
        return out

    def fiber(self, v) -> frozenset:
        return frozenset(self.children_map[v])

    @property
    def edges(self) -> frozenset:
        return frozenset(_edge(c, p) for c, p in self.parent)


@dataclass(frozen=True)
class PlanarTree:
    """Rooted tree with a total order on each fiber (only nonempty fibers stored)."""

    root: object
    order: tuple  # ((vertex, (child, ...)), ...) sorted by vertex

    @staticmethod
    def of(root, order_map: dict) -> "PlanarTree":
        items = tuple(
            sorted(
                ((v, tuple(cs)) for v, cs in order_map.items() if cs),
                key=lambda kv: label_key(kv[0]),
            )
        )
        return PlanarTree(root, items)

    @cached_property
    def order_map(self) -> dict:
        return dict(self.order)

    @cached_property
    def parent_map(self) -> dict:
        out = {}
        for v, cs in self.order:
            for c in cs:
                out[c] = v
        return out

    @cached_property
    def labels(self) -> frozenset:
        return frozenset((self.root,)) | frozenset(self.parent_map)

    def fiber_order(self, v) -> tuple:
        return self.order_map.get(v, ())

    def to_rooted(self) -> RootedTree:
        return RootedTree.of(self.root, self.parent_map)


@dataclass(frozen=True)
class LinearOrder:
    """A linear order, the structures of the monoid species L."""

    seq: tuple

    @property
    def labels(self) -> frozenset:
        return frozenset(self.seq)


@dataclass(frozen=True)
class EnrichedTree:
    """Rooted tree whose nonempty fibers carry N-structures of a monoid species."""

    monoid: str
    root: object
    parent: tuple
    enrich: tuple  # ((vertex, n-structure), ...) for nonempty fibers, sorted by vertex

    @staticmethod
    def of(monoid: str, root, parent_map: dict, enrich_map: dict) -> "EnrichedTree":
        items = tuple(
            sorted(
                ((v, n) for v, n in enrich_map.items() if _monoid_labels(n)),
                key=lambda kv: label_key(kv[0]),
            )
        )
        tree = RootedTree.of(root, parent_map)
        return EnrichedTree(monoid, root, tree.parent, items)

    @cached_property
    def tree(self) -> RootedTree:
        return RootedTree(self.root, self.parent)

    @cached_property
    def labels(self) -> frozenset:
        return self.tree.labels

    @cached_property
    def enrich_map(self) -> dict:
        return dict(self.enrich)


def _monoid_labels(n) -> frozenset:
    return n.labels


# ---------------------------------------------------------------------------
# monoid species (set monoids): E with union, L with concatenation


class MonoidSpecies:
    """A species with an associative product nu on disjoint label sets."""

    name: str

    def structures(self, labels) -> list:
        raise NotImplementedError

    def nu(self, a, b):
        raise NotImplementedError

    def relabel(self, s, f):
        raise NotImplementedError

    def empty(self):
        raise NotImplementedError

    def labeled_bytes(self, s, pos: dict) -> bytes:
        """Encode the labelled structure with labels replaced by positions."""
        raise NotImplementedError


class EMonoid(MonoidSpecies):
    name = "E"

    def structures(self, labels):
        return [SetStruct(frozenset(labels))]

    def nu(self, a, b):
        return SetStruct(a.labels | b.labels)

    def relabel(self, s, f):
        return SetStruct(frozenset(f[x] for x in s.labels))

    def empty(self):
        return SetStruct(frozenset())

    def labeled_bytes(self, s, pos):
        return b"E"


class LMonoid(MonoidSpecies):
    name = "L"

    def structures(self, labels):
        return [LinearOrder(p) for p in permutations(sorted_labels(labels))]

    def nu(self, a, b):
        return LinearOrder(a.seq + b.seq)

    def relabel(self, s, f):
        return LinearOrder(tuple(f[x] for x in s.seq))

    def empty(self):
        return LinearOrder(())

    def labeled_bytes(self, s, pos):
        return b"L" + bytes(pos[x] for x in s.seq)


E_MONOID = EMonoid()
L_MONOID = LMonoid()
MONOIDS = {"E": E_MONOID, "L": L_MONOID}


# ---------------------------------------------------------------------------
# species


class Species:
    """Enumeration, canonical forms and relabelling for one species."""

    tag: str

    def structures(self, labels, cap: int | None = None) -> list:
        labels = frozenset(labels)
        key = (tuple(sorted_labels(labels)), size_cap(self.tag, cap))
        cache = self._cache
        if key not in cache:
            check_cap(len(labels), self.tag, cap)
            cache[key] = list(self._enumerate(labels))
        return cache[key]

    def __init__(self):
        self._cache: dict = {}
        self._key_cache: dict = {}

    def _enumerate(self, labels):
        raise NotImplementedError

    def singleton(self, label):
        raise NotImplementedError

    def relabel(self, s, f: dict):
        raise NotImplementedError

    def labels_of(self, s) -> frozenset:
        return s.labels

    def canonical_bytes(self, s) -> bytes:
        raise NotImplementedError

    def key(self, s) -> TypeKey:
        cached = self._key_cache.get(s)
        if cached is None:
            n = len(self.labels_of(s))
            check_cap(n, self.tag)
            cached = TypeKey(self.tag, n, self.canonical_bytes(s))
            self._key_cache[s] = cached
        return cached

    def is_valid(self, s) -> bool:
        raise NotImplementedError


class SetSpecies(Species):
    tag = "set"

    def _enumerate(self, labels):
        if labels:
            yield SetStruct(labels)

    def singleton(self, label):
        return SetStruct(frozenset((label,)))

    def relabel(self, s, f):
        return SetStruct(frozenset(f[x] for x in s.labels))

    def canonical_bytes(self, s):
        return b""

    def is_valid(self, s):
        return isinstance(s, SetStruct) and bool(s.labels)


class PointedSetSpecies(Species):
    tag = "pset"

    def _enumerate(self, labels):
        for p in sorted_labels(labels):
            yield PointedSet(labels, p)

    def singleton(self, label):
        return PointedSet(frozenset((label,)), label)

    def relabel(self, s, f):
        return PointedSet(frozenset(f[x] for x in s.labels), f[s.point])

    def canonical_bytes(self, s):
        return b""

    def is_valid(self, s):
        return isinstance(s, PointedSet) and s.point in s.labels


def _adjacency(labels, edges) -> dict:
    adj = {v: set() for v in labels}
    for e in edges:
        u, v = tuple(e)
        adj[u].add(v)
        adj[v].add(u)
    return adj


def connected(labels, edges) -> bool:
    labels = frozenset(labels)
    if not labels:
        return False
    adj = _adjacency(labels, edges)
    start = next(iter(labels))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == labels


def _graph_canonical_bytes(labels, edges, point=None) -> bytes:
    """Lexicographically minimal adjacency bits over invariant-respecting orders.

    Vertices are grouped into classes by an isomorphism-invariant signature
    (point flag, degree, sorted neighbour degrees); the minimum is taken over
    all orders refining the class order, which is enough to separate
    isomorphism types at these sizes.
    """
    verts = sorted_labels(labels)
    n = len(verts)
    adj = _adjacency(labels, edges)
    deg = {v: len(adj[v]) for v in verts}
    sig = {}
    for v in verts:
        flag = 0 if (point is not None and v == point) else 1
        sig[v] = (flag, deg[v], tuple(sorted(deg[w] for w in adj[v])))
    classes: dict = {}
    for v in verts:
        classes.setdefault(sig[v], []).append(v)
    ordered_classes = [classes[s] for s in sorted(classes)]
    best: bytes | None = None
    for perm_parts in product(*[permutations(c) for c in ordered_classes]):
        order = [v for part in perm_parts for v in part]
        pos = {v: i for i, v in enumerate(order)}
        bits = 0
        for e in edges:
            u, v = tuple(e)
            i, j = pos[u], pos[v]
            if i > j:
                i, j = j, i
            bits |= 1 << (i * n + j)
        cand = bits.to_bytes((n * n + 7) // 8, "big")
        if best is None or cand < best:
            best = cand
    return best if best is not None else b""


class GraphSpecies(Species):
    tag = "graph"

    def _enumerate(self, labels):
        verts = sorted_labels(labels)
        if len(verts) == 1:
            yield Graph(labels, frozenset())
            return
        pairs = [_edge(u, v) for u, v in combinations(verts, 2)]
        for bits in range(1 << len(pairs)):
            edges = frozenset(p for i, p in enumerate(pairs) if bits >> i & 1)
            if connected(labels, edges):
                yield Graph(labels, edges)

    def singleton(self, label):
        return Graph(frozenset((label,)), frozenset())

    def relabel(self, s, f):
        return Graph(
            frozenset(f[x] for x in s.labels),
            frozenset(_edge(f[u], f[v]) for u, v in (tuple(e) for e in s.edges)),
        )

    def canonical_bytes(self, s):
        return _graph_canonical_bytes(s.labels, s.edges)

    def is_valid(self, s):
        return (
            isinstance(s, Graph)
            and all(len(e) == 2 and e <= s.labels for e in s.edges)
            and connected(s.labels, s.edges)
        )


class PointedGraphSpecies(Species):
    tag = "pgraph"

    def _enumerate(self, labels):
        for g in GRAPH.structures(labels):
            for p in sorted_labels(labels):
                yield PointedGraph(labels, g.edges, p)

    def singleton(self, label):
        return PointedGraph(frozenset((label,)), frozenset(), label)

    def relabel(self, s, f):
        g = GRAPH.relabel(Graph(s.labels, s.edges), f)
        return PointedGraph(g.labels, g.edges, f[s.point])

    def canonical_bytes(self, s):
        return _graph_canonical_bytes(s.labels, s.edges, point=s.point)

    def is_valid(self, s):
        return (
            isinstance(s, PointedGraph)
            and s.point in s.labels
            and GRAPH.is_valid(Graph(s.labels, s.edges))
        )


def _prufer_decode(seq: tuple, verts: list) -> frozenset:
    """Edge set of the labelled free tree with Pruefer sequence ``seq``."""
    degree = {v: 1 for v in verts}
    for v in seq:
        degree[v] += 1
    edges = []
    remaining = sorted_labels(verts)
    seq = list(seq)
    for v in seq:
        for leaf in remaining:
            if degree[leaf] == 1:
                edges.append(_edge(leaf, v))
                degree[leaf] -= 1
                degree[v] -= 1
                remaining.remove(leaf)
                break
    u, w = [v for v in remaining if degree[v] == 1]
    edges.append(_edge(u, w))
    return frozenset(edges)


def free_tree_edge_sets(labels) -> list:
    """All labelled free trees on the label set, as edge sets."""
    verts = sorted_labels(labels)
    n = len(verts)
    if n == 1:
        return [frozenset()]
    if n == 2:
        return [frozenset((_edge(verts[0], verts[1]),))]
    return [_prufer_decode(seq, verts) for seq in product(verts, repeat=n - 2)]


def _orient(root, edges) -> dict:
    adj = _adjacency({root} | {v for e in edges for v in e}, edges)
    parent: dict = {}
    stack = [root]
    seen = {root}
    while stack:
        u = stack.pop()
        for w in sorted_labels(adj[u]):
            if w not in seen:
                seen.add(w)
                parent[w] = u
                stack.append(w)
    return parent


class RootedTreeSpecies(Species):
    tag = "tree"

    def _enumerate(self, labels):
        for edges in free_tree_edge_sets(labels):
            for root in sorted_labels(labels):
                yield RootedTree.of(root, _orient(root, edges))

    def singleton(self, label):
        return RootedTree.of(label, {})

    def relabel(self, s, f):
        return RootedTree.of(f[s.root], {f[c]: f[p] for c, p in s.parent})

    def canonical_bytes(self, s):
        children = s.children_map

        def enc(v) -> bytes:
            return b"(" + b"".join(sorted(enc(c) for c in children[v])) + b")"

        return enc(s.root)

    def is_valid(self, s):
        if not isinstance(s, RootedTree) or s.root in s.parent_map:
            return False
        return connected(s.labels, s.edges) and len(s.parent) == len(s.labels) - 1


class PlanarTreeSpecies(Species):
    tag = "ptree"

    def _enumerate(self, labels):
        for t in TREE.structures(labels):
            fibers = [(v, cs) for v, cs in t.children_map.items() if cs]
            for perm_choice in product(*[permutations(cs) for _, cs in fibers]):
                order = {v: choice for (v, _), choice in zip(fibers, perm_choice)}
                yield PlanarTree.of(t.root, order)

    def singleton(self, label):
        return PlanarTree.of(label, {})

    def relabel(self, s, f):
        return PlanarTree.of(
            f[s.root], {f[v]: tuple(f[c] for c in cs) for v, cs in s.order}
        )

    def canonical_bytes(self, s):
        order = s.order_map

        def enc(v) -> bytes:
            return b"(" + b"".join(enc(c) for c in order.get(v, ())) + b")"

        return enc(s.root)

    def is_valid(self, s):
        if not isinstance(s, PlanarTree):
            return False
        return TREE.is_valid(s.to_rooted()) and all(
            len(set(cs)) == len(cs) for _, cs in s.order
        )


class EnrichedTreeSpecies(Species):
    """Trees enriched by a monoid species N on each fiber (Arb_N structures)."""

    def __init__(self, monoid: MonoidSpecies):
        super().__init__()
        self.monoid = monoid
        self.tag = f"etree-{monoid.name}"

    def _enumerate(self, labels):
        N = self.monoid
        for t in TREE.structures(labels):
            fibers = [(v, cs) for v, cs in t.children_map.items() if cs]
            pools = [N.structures(frozenset(cs)) for _, cs in fibers]
            for choice in product(*pools):
                enrich = {v: n for (v, _), n in zip(fibers, choice)}
                yield EnrichedTree.of(N.name, t.root, t.parent_map, enrich)

    def singleton(self, label):
        return EnrichedTree.of(self.monoid.name, label, {}, {})

    def relabel(self, s, f):
        return EnrichedTree.of(
            self.monoid.name,
            f[s.root],
            {f[c]: f[p] for c, p in s.parent},
            {f[v]: self.monoid.relabel(n, f) for v, n in s.enrich},
        )

    def canonical_bytes(self, s):
        N = self.monoid
        children = s.tree.children_map
        enrich = s.enrich_map

        def enc(v) -> bytes:
            fiber = children[v]
            if not fiber:
                return b"()"
            subs = {u: enc(u) for u in fiber}
            n = enrich[v]
            best = None
            for perm in permutations(fiber):
                pos = {u: i for i, u in enumerate(perm)}
                cand = (
                    b"("
                    + N.labeled_bytes(n, pos)
                    + b"|"
                    + b"".join(subs[u] for u in perm)
                    + b")"
                )
                if best is None or cand < best:
                    best = cand
            return best

        return enc(s.root)

    def is_valid(self, s):
        if not isinstance(s, EnrichedTree) or s.monoid != self.monoid.name:
            return False
        if not TREE.is_valid(s.tree):
            return False
        enrich = s.enrich_map
        for v in sorted_labels(s.labels):
            fiber = s.tree.fiber(v)
            if fiber:
                if v not in enrich or _monoid_labels(enrich[v]) != fiber:
                    return False
            elif v in enrich:
                return False
        return True


SET = SetSpecies()
PSET = PointedSetSpecies()
GRAPH = GraphSpecies()
PGRAPH = PointedGraphSpecies()
TREE = RootedTreeSpecies()
PTREE = PlanarTreeSpecies()
ETREE_E = EnrichedTreeSpecies(E_MONOID)
ETREE_L = EnrichedTreeSpecies(L_MONOID)

SPECIES = {
    sp.tag: sp
    for sp in (SET, PSET, GRAPH, PGRAPH, TREE, PTREE, ETREE_E, ETREE_L)
}


def canonical_key(s) -> TypeKey:
    """TypeKey of a structure, dispatching on its type."""
    return species_of(s).key(s)


def species_of(s) -> Species:
    if isinstance(s, SetStruct):
        return SET
    if isinstance(s, PointedSet):
        return PSET
    if isinstance(s, Graph):
        return GRAPH
    if isinstance(s, PointedGraph):
        return PGRAPH
    if isinstance(s, RootedTree):
        return TREE
    if isinstance(s, PlanarTree):
        return PTREE
    if isinstance(s, EnrichedTree):
        return SPECIES[f"etree-{s.monoid}"]
    raise TypeError(f"not a structure: {s!r}")


def enumerate_structures(species: Species | str, labels, cap: int | None = None) -> list:
    if isinstance(species, str):
        species = SPECIES[species]
    return species.structures(frozenset(labels), cap)


# ---------------------------------------------------------------------------
# set partitions


def partitions(
    labels,
    min_blocks: int | None = None,
    max_blocks: int | None = None,
    block_min_size: int | None = None,
):
    """All set partitions of ``labels``, with optional filters, each exactly once."""
    elems = sorted_labels(frozenset(labels))

    def rec(i, blocks):
        if i == len(elems):
            yield [frozenset(b) for b in blocks]
            return
        x = elems[i]
        for b in blocks:
            b.append(x)
            yield from rec(i + 1, blocks)
            b.pop()
        blocks.append([x])
        yield from rec(i + 1, blocks)
        blocks.pop()

    for part in rec(0, []):
        if min_blocks is not None and len(part) < min_blocks:
            continue
        if max_blocks is not None and len(part) > max_blocks:
            continue
        if block_min_size is not None and any(len(b) < block_min_size for b in part):
            continue
        yield frozenset(part)


# ---------------------------------------------------------------------------
# text formats


def parse_graph(text: str):
    """Parse "n=4; 1 2; 1 3" graph text; a "point=v" segment makes it pointed."""
    n = None
    point = None
    edges = set()
    for raw in text.split(";"):
        seg = raw.strip()
        if not seg:
            continue
        if seg.startswith("n="):
            n = int(seg[2:])
        elif seg.startswith("point="):
            point = int(seg[6:])
        else:
            parts = seg.split()
            if len(parts) != 2:
                raise ParseError(f"bad edge segment {seg!r}")
            u, v = int(parts[0]), int(parts[1])
            if u == v:
                raise ParseError(f"loop edge {seg!r}")
            edges.add(_edge(u, v))
    if n is None:
        raise ParseError("missing 'n=<count>' segment")
    labels = frozenset(range(1, n + 1))
    for e in edges:
        if not e <= labels:
            raise ParseError(f"edge {sorted(e)} outside 1..{n}")
    if not connected(labels, frozenset(edges)):
        raise ParseError("graph is not connected")
    if point is not None:
        if point not in labels:
            raise ParseError(f"point {point} outside 1..{n}")
        return PointedGraph(labels, frozenset(edges), point)
    return Graph(labels, frozenset(edges))


def _tokenize_tree(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "(),":
            tokens.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < len(text) and text[j] not in "(),":
                j += 1
            tokens.append(text[i:j].strip())
            i = j
    return tokens


def parse_tree(text: str, planar: bool = False):
    """Parse "1(2,3(4))" nested-parenthesis tree text.

    The written order of children is the fiber order when ``planar``.
    """
    tokens = _tokenize_tree(text)
    pos = 0

    def atom(tok):
        return int(tok) if tok.lstrip("-").isdigit() else tok

    def node():
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] in "(),":
            raise ParseError(f"expected a label at token {pos} of {text!r}")
        label = atom(tokens[pos])
        pos += 1
        children = []
        if pos < len(tokens) and tokens[pos] == "(":
            pos += 1
            while True:
                children.append(node())
                if pos >= len(tokens):
                    raise ParseError(f"unbalanced parentheses in {text!r}")
                if tokens[pos] == ",":
                    pos += 1
                    continue
                if tokens[pos] == ")":
                    pos += 1
                    break
                raise ParseError(f"unexpected token {tokens[pos]!r} in {text!r}")
        return (label, children)

    top = node()
    if pos != len(tokens):
        raise ParseError(f"trailing tokens in {text!r}")

    parent_map: dict = {}
    order_map: dict = {}
    seen = set()

    def walk(nd):
        label, children = nd
        if label in seen:
            raise ParseError(f"duplicate label {label!r} in {text!r}")
        seen.add(label)
        order_map[label] = tuple(c[0] for c in children)
        for c in children:
            parent_map[c[0]] = label
            walk(c)

    walk(top)
    if planar:
        return PlanarTree.of(top[0], order_map)
    return RootedTree.of(top[0], parent_map)


def tree_shape(key_or_structure) -> str:
    """Readable shape string for a tree canonical encoding, e.g. "o(o,o(o))"."""
    if isinstance(key_or_structure, TypeKey):
        data = key_or_structure.data
    else:
        data = species_of(key_or_structure).canonical_bytes(key_or_structure)
    text = data.decode()
    pos = 0

    def rec() -> str:
        nonlocal pos
        assert text[pos] == "("
        pos += 1
        kids = []
        while pos < len(text) and text[pos] == "(":
            kids.append(rec())
        assert text[pos] == ")"
        pos += 1
        if not kids:
            return "o"
        return "o(" + ",".join(kids) + ")"

    return rec()
