"""Enriched Schroeder trees, the general antipode, and its specializations.

Three independent routes to the antipode live here and in :mod:`hopf`:

* the convolution-inverse recursion (:meth:`HopfContext.antipode`),
* the signed sum over enriched Schroeder trees (:func:`antipode_schroeder`),
* the admissible-coloration formulas for trees, planar trees, graphs and
  pointed graphs (:func:`antipode_colorings`).

The depth-coloring devices connecting them (phi, the colored evaluation of a
Schroeder tree, and the reconstruction of a Schroeder tree from a coloring)
are implemented explicitly so the bijections can be tested.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .algebra import Polynomial
from .errors import ShapeMismatch, SpeciesMismatch
from .hopf import HopfContext
from .operads import Assembly, Operad
from .structures import (
    EnrichedTree,
    Graph,
    PlanarTree,
    PointedGraph,
    PointedSet,
    RootedTree,
    SetStruct,
    _adjacency,
    _edge,
    label_key,
    sorted_labels,
    species_of,
)

# ---------------------------------------------------------------------------
# Schroeder trees


@dataclass(frozen=True)
class SLeaf:
    label: object

    @property
    def leaves(self) -> frozenset:
        return frozenset((self.label,))

    @property
    def internal_count(self) -> int:
        return 0


@dataclass(frozen=True)
class SNode:
    children: tuple
    dec: object  # operad structure on the blocks (the children's leaf sets)

    @staticmethod
    def of(children, dec) -> "SNode":
        children = tuple(
            sorted(children, key=lambda c: label_key(sorted_labels(c.leaves)[0]))
        )
        return SNode(children, dec)

    @property
    def leaves(self) -> frozenset:
        out: frozenset = frozenset()
        for c in self.children:
            out |= c.leaves
        return out

    @property
    def internal_count(self) -> int:
        return 1 + sum(c.internal_count for c in self.children)


SchroederTree = SLeaf | SNode


def decorations(t: SchroederTree):
    if isinstance(t, SNode):
        yield t.dec
        for c in t.children:
            yield from decorations(c)


def eta_hat(op: Operad, t: SchroederTree):
    """Evaluate the tree bottom-up through the operad product."""
    if isinstance(t, SLeaf):
        return op.species.singleton(t.label)
    pieces = [eta_hat(op, c) for c in t.children]
    return op.eta(Assembly.of(pieces), t.dec)


def enumerate_schroeder(op: Operad, m) -> list:
    """All Schroeder trees evaluating to ``m``, by recursion over factorizations."""
    if len(op.species.labels_of(m)) == 1:
        label = next(iter(op.species.labels_of(m)))
        return [SLeaf(label)]
    out = []
    for f in op.factorizations(m, min_blocks=2):
        pools = [enumerate_schroeder(op, piece) for piece in f.assembly.pieces]
        for combo in product(*pools):
            out.append(SNode.of(combo, f.outer))
    return out


def antipode_schroeder(ctx: HopfContext, key) -> Polynomial:
    """Signed sum over Schroeder trees of the decoration-type monomials."""
    if key.is_singleton:
        return Polynomial.one()
    sp = ctx.operad.species
    rep = ctx.representative(key)
    total = Polynomial.zero()
    for t in enumerate_schroeder(ctx.operad, rep):
        term = Polynomial.constant((-1) ** t.internal_count)
        for dec in decorations(t):
            term = term * Polynomial.generator(sp.key(dec))
        total = total + term
    return total


# ---------------------------------------------------------------------------
# edge colorings


@dataclass(frozen=True)
class EdgeColoring:
    """A map from edges (2-element frozensets) to positive integer colors."""

    items: tuple  # ((sorted-vertex-pair, color), ...) sorted

    @staticmethod
    def of(mapping: dict) -> "EdgeColoring":
        items = tuple(
            sorted(
                ((tuple(sorted_labels(e)), c) for e, c in mapping.items()),
                key=lambda kv: tuple(label_key(x) for x in kv[0]),
            )
        )
        return EdgeColoring(items)

    def as_dict(self) -> dict:
        return {frozenset(pair): c for pair, c in self.items}

    @property
    def image(self) -> frozenset:
        return frozenset(c for _, c in self.items)

    def max_color(self) -> int:
        return max((c for _, c in self.items), default=0)

    def restrict(self, vertices: frozenset) -> "EdgeColoring":
        return EdgeColoring.of(
            {e: c for e, c in self.as_dict().items() if e <= vertices}
        )


def _edges_of(structure) -> frozenset:
    if isinstance(structure, (Graph, PointedGraph, RootedTree)):
        return structure.edges
    if isinstance(structure, PlanarTree):
        return structure.to_rooted().edges
    if isinstance(structure, EnrichedTree):
        return structure.tree.edges
    raise SpeciesMismatch(f"no edges on {structure!r}")


def _components(vertices: frozenset, edges) -> list:
    """Connected components of (vertices, edges) as (vertexset, edgeset) pairs."""
    adj = _adjacency(vertices, edges)
    seen: set = set()
    out = []
    for start in sorted_labels(vertices):
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            for w in adj[stack.pop()]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        cedges = frozenset(e for e in edges if e <= comp)
        out.append((frozenset(comp), cedges))
    return out


def coloring_from_schroeder(op: Operad, t: SchroederTree):
    """Evaluate a Schroeder tree, coloring each edge by the depth that created it.

    Only meaningful for graphical operads (trees, planar trees, graphs,
    pointed graphs) where eta inserts edges.
    """

    def rec(node, depth):
        if isinstance(node, SLeaf):
            return op.species.singleton(node.label), {}
        colors: dict = {}
        pieces = []
        for c in node.children:
            piece, sub = rec(c, depth + 1)
            pieces.append(piece)
            colors.update(sub)
        m = op.eta(Assembly.of(pieces), node.dec)
        old = frozenset().union(*[_edges_of(p) for p in pieces])
        for e in _edges_of(m) - old:
            colors[e] = depth
        return m, colors

    m, colors = rec(t, 1)
    return m, EdgeColoring.of(colors)


def schroeder_from_coloring(op: Operad, m, coloring: EdgeColoring, base: int = 1):
    """Rebuild the Schroeder tree whose depth-coloring of ``m`` is ``coloring``."""
    sp = op.species
    U = sp.labels_of(m)
    if len(U) == 1:
        return SLeaf(next(iter(U)))
    cmap = coloring.as_dict()
    high = [e for e, c in cmap.items() if c > base]
    piece_sets = frozenset(vs for vs, _ in _components(U, high))
    match = None
    for f in op.factorizations(m):
        if f.assembly.partition == piece_sets:
            match = f
            break
    if match is None:
        raise ShapeMismatch("coloring does not describe a factorization")
    for piece in match.assembly.pieces:
        expected = frozenset(e for e in high if e <= piece.labels)
        if _edges_of(piece) != expected:
            raise ShapeMismatch("piece edges disagree with the coloring")
    children = []
    for piece in match.assembly.pieces:
        children.append(
            schroeder_from_coloring(op, piece, coloring.restrict(piece.labels), base + 1)
        )
    return SNode.of(children, match.outer)


# ---------------------------------------------------------------------------
# the phi bijection for X.M-shaped decorations


@dataclass(frozen=True)
class ColoredTree:
    """A rooted or planar tree together with an admissible edge coloring."""

    tree: object
    coloring: EdgeColoring


def erase_colors(colored: ColoredTree):
    return colored.tree


class _XMAdapter:
    """Split decorations into (preferred block, component shape) and rebuild them."""

    planar = False
    enriched = False

    def split(self, dec):
        """Return (preferred block, parent-of map on the other blocks, fiber orders).

        In the shape map the preferred block is represented by None; fiber
        orders map each decoration vertex to its ordered children (planar
        adapters only; others return child sets in label order).
        """
        raise NotImplementedError

    def join(self, root_block, shape, orders):
        """Rebuild a decoration from the component shape on blocks."""
        raise NotImplementedError


class _PointedSetAdapter(_XMAdapter):
    def split(self, dec):
        pref = dec.point
        shape = {b: None for b in dec.labels if b != pref}
        orders = {None: tuple(sorted_labels(b for b in dec.labels if b != pref))}
        return pref, shape, orders

    def join(self, root_block, shape, orders):
        if any(p is not None for p in shape.values()):
            raise ShapeMismatch("pointed-set decorations are star shaped")
        return PointedSet(frozenset(shape) | {root_block}, root_block)


class _TreeAdapter(_XMAdapter):
    def split(self, dec):
        pref = dec.root
        shape = {
            b: (None if p == pref else p) for b, p in dec.parent_map.items()
        }
        orders = {
            (None if v == pref else v): tuple(cs)
            for v, cs in dec.children_map.items()
            if cs
        }
        return pref, shape, orders

    def join(self, root_block, shape, orders):
        parent = {b: (root_block if p is None else p) for b, p in shape.items()}
        return RootedTree.of(root_block, parent)


class _PlanarAdapter(_XMAdapter):
    planar = True

    def split(self, dec):
        pref = dec.root
        shape = {
            b: (None if p == pref else p) for b, p in dec.parent_map.items()
        }
        orders = {
            (None if v == pref else v): dec.fiber_order(v)
            for v in dec.labels
            if dec.fiber_order(v)
        }
        return pref, shape, orders

    def join(self, root_block, shape, orders):
        order = {
            (root_block if v is None else v): tuple(cs)
            for v, cs in orders.items()
            if cs
        }
        return PlanarTree.of(root_block, order)


class _EnrichedEAdapter(_TreeAdapter):
    enriched = True

    def split(self, dec):
        return _TreeAdapter.split(self, _plain_tree(dec))

    def join(self, root_block, shape, orders):
        t = _TreeAdapter.join(self, root_block, shape, orders)
        return _as_enriched_e(t)


def _plain_tree(dec):
    if isinstance(dec, EnrichedTree):
        if dec.monoid != "E":
            raise ShapeMismatch("phi adapter only handles E-enriched trees")
        return dec.tree
    return dec


def _as_enriched_e(tree: RootedTree) -> EnrichedTree:
    enrich = {
        v: SetStruct(frozenset(cs)) for v, cs in tree.children_map.items() if cs
    }
    return EnrichedTree.of("E", tree.root, tree.parent_map, enrich)


_ADAPTERS = {
    "e.": _PointedSetAdapter(),
    "arb": _TreeAdapter(),
    "arb-l": _PlanarAdapter(),
    "arb-n-e": _EnrichedEAdapter(),
}


def _adapter_for(op: Operad) -> _XMAdapter:
    try:
        return _ADAPTERS[op.name]
    except KeyError:
        raise SpeciesMismatch(
            f"phi needs X.M-shaped decorations; unsupported operad {op.name}"
        ) from None


def phi(op: Operad, t: SchroederTree) -> ColoredTree:
    """Main-spine contraction of an X.M-enriched Schroeder tree.

    The output is a rooted (or planar) tree on the leaves whose edges are
    colored with the depth of the internal vertex that created them.
    """
    adapter = _adapter_for(op)
    parent: dict = {}
    colors: dict = {}
    parts: dict = {}

    def rec(node, depth):
        if isinstance(node, SLeaf):
            return node.label
        pref, shape, orders = adapter.split(node.dec)
        by_block = {c.leaves: c for c in node.children}
        spine_root = rec(by_block[pref], depth + 1)
        sub_root = {None: spine_root}
        for b in shape:
            sub_root[b] = rec(by_block[b], depth + 1)
        for b, p in shape.items():
            r = sub_root[b]
            parent[r] = sub_root[p]
            colors[r] = depth
        for v, cs in orders.items():
            parts.setdefault(sub_root[v], []).append(
                (depth, tuple(sub_root[c] for c in cs))
            )
        return spine_root

    root = rec(t, 1)
    coloring = EdgeColoring.of(
        {_edge(v, parent[v]): c for v, c in colors.items()}
    )
    if adapter.planar:
        order = {
            v: sum(
                (cs for _, cs in sorted(plist, key=lambda pc: -pc[0])),
                (),
            )
            for v, plist in parts.items()
        }
        return ColoredTree(PlanarTree.of(root, order), coloring)
    tree = RootedTree.of(root, parent)
    if adapter.enriched:
        return ColoredTree(_as_enriched_e(tree), coloring)
    return ColoredTree(tree, coloring)


def phi_inv(op: Operad, colored: ColoredTree) -> SchroederTree:
    """Inverse of :func:`phi`: expand the colored tree back into a Schroeder tree."""
    adapter = _adapter_for(op)
    t = colored.tree
    if isinstance(t, EnrichedTree):
        t = t.tree
    planar = isinstance(t, PlanarTree)
    parent_map = t.parent_map
    cmap = {}
    for e, c in colored.coloring.as_dict().items():
        u, v = tuple(e)
        child = u if parent_map.get(u) == v else v
        cmap[child] = c

    def children_of(v, verts):
        if planar:
            return tuple(c for c in t.fiber_order(v) if c in verts)
        return tuple(
            c for c in sorted_labels(verts) if parent_map.get(c) == v
        )

    def rec(root, verts, depth):
        if len(verts) == 1:
            return SLeaf(root)
        # the depth-colored component containing the local root
        W = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for c in children_of(v, verts):
                if cmap[c] == depth and c not in W:
                    W.add(c)
                    stack.append(c)
        if W == {root}:
            raise ShapeMismatch("no component of the expected color at the root")
        piece_sets: dict = {}
        for w in W:
            piece = {w}
            stack = [w]
            while stack:
                v = stack.pop()
                for c in children_of(v, verts):
                    if c not in W and c not in piece and cmap[c] != depth:
                        piece.add(c)
                        stack.append(c)
            piece_sets[w] = frozenset(piece)
        block = {w: piece_sets[w] for w in W}
        shape = {
            block[w]: (None if parent_map[w] == root else block[parent_map[w]])
            for w in W
            if w != root
        }
        orders = {}
        for w in W:
            cs = tuple(c for c in children_of(w, verts) if c in W and cmap[c] == depth)
            if cs:
                orders[None if w == root else block[w]] = tuple(block[c] for c in cs)
        dec = adapter.join(block[root], shape, orders)
        children = [rec(w, piece_sets[w], depth + 1) for w in W]
        return SNode.of(children, dec)

    return rec(t.root, t.labels, 1)


def nu_hat(op: Operad, colored: ColoredTree):
    """Forget the coloring, performing the deferred monoid products.

    For the operads supported by phi this is simply the underlying structure:
    planar fiber orders already concatenate the parts in decreasing color
    order, matching the right-to-left evaluation of the monoid product.
    """
    return colored.tree


# ---------------------------------------------------------------------------
# admissible colorings, species by species


def admissible_colorings(op_or_species, m) -> list[EdgeColoring]:
    """All admissible edge colorations of ``m`` for its species."""
    sp = species_of(m)
    if sp.tag == "tree":
        return _tree_colorings(m.children_map, m.root, planar_orders=None)
    if sp.tag == "ptree":
        rooted = m.to_rooted()
        return _tree_colorings(
            rooted.children_map, rooted.root, planar_orders=m.order_map
        )
    if sp.tag == "graph":
        return _graph_colorings(m)
    if sp.tag == "pgraph":
        return _pgraph_colorings(m)
    raise SpeciesMismatch(f"no admissible colorations for species {sp.tag}")


def _tree_colorings(children_map, root, planar_orders) -> list[EdgeColoring]:
    verts = [v for v in children_map if v != root]
    nedges = len(verts)
    if nedges == 0:
        return []
    out = []
    order = []  # BFS, parents before children

    parents = {}
    queue = [root]
    while queue:
        v = queue.pop(0)
        for c in children_map[v]:
            parents[c] = v
            order.append(c)
            queue.append(c)

    colors: dict = {}

    def admissible() -> bool:
        if min(colors.values()) != 1:
            return False
        image = set(colors.values())
        if image != set(range(1, max(image) + 1)):
            return False
        # each color-i component root needs an incident (i-1)-edge, i >= 2
        for w in children_map:
            child_colors = {colors[c] for c in children_map[w]}
            incident = set(child_colors)
            if w != root:
                incident.add(colors[w])
            for i in child_colors:
                if i >= 2 and colors.get(w) != i:
                    if i - 1 not in incident:
                        return False
        if planar_orders is not None:
            for v, cs in planar_orders.items():
                seq = [colors[c] for c in cs]
                if any(a < b for a, b in zip(seq, seq[1:])):
                    return False
        return True

    def rec(i):
        if i == len(order):
            if admissible():
                out.append(EdgeColoring.of({_edge(v, parents[v]): c for v, c in colors.items()}))
            return
        v = order[i]
        lo = colors.get(parents[v], 1)
        for c in range(lo, nedges + 1):
            colors[v] = c
            rec(i + 1)
            del colors[v]

    rec(0)
    return out


def _graph_level_quotients(g: Graph, cmap: dict):
    """Per-color quotient assemblies of a colored graph, or None if inadmissible.

    For each color i the components of the edges colored >= i must divide the
    components of the edges colored >= i-1; the quotient contracts them and
    its non-singleton components are the factors of the antipode term.
    """
    k = max(cmap.values())
    levels = {}
    for i in range(1, k + 2):
        edges = frozenset(e for e, c in cmap.items() if c >= i)
        levels[i] = _components(g.labels, edges)
    quotients = []
    for i in range(1, k + 1):
        level_terms = []
        finer = levels[i + 1]
        for comp_vs, comp_edges in levels[i]:
            blocks = [vs for vs, _ in finer if vs <= comp_vs]
            if len(blocks) == 1:
                continue  # contracts to a singleton
            block_of = {v: b for b in blocks for v in b}
            joins: dict = {}
            for e in comp_edges:
                u, v = tuple(e)
                bu, bv = block_of[u], block_of[v]
                if bu == bv:
                    if cmap[e] == i:
                        return None  # an exactly-i edge inside a block
                    continue
                joins.setdefault(_edge(bu, bv), set()).add(e)
            for pair, seen in joins.items():
                b1, b2 = tuple(pair)
                if len(seen) != len(b1) * len(b2):
                    return None  # not a complete join
            level_terms.append(Graph(frozenset(blocks), frozenset(joins)))
        quotients.append(level_terms)
    return quotients


def _graph_colorings(g: Graph) -> list[EdgeColoring]:
    edges = sorted(g.edges, key=lambda e: tuple(label_key(x) for x in sorted_labels(e)))
    if not edges:
        return []
    incident: dict = {v: [] for v in g.labels}
    for e in edges:
        for v in e:
            incident[v].append(e)
    out = []
    for assignment in product(range(1, len(edges) + 1), repeat=len(edges)):
        cmap = dict(zip(edges, assignment))
        image = set(assignment)
        if image != set(range(1, max(image) + 1)):
            continue
        ok = True
        for v in g.labels:
            cols = {cmap[e] for e in incident[v]}
            if any(i >= 2 and i - 1 not in cols for i in cols):
                ok = False
                break
        if not ok:
            continue
        if _graph_level_quotients(g, cmap) is None:
            continue
        out.append(EdgeColoring.of(cmap))
    return out


def _pgraph_colorings(pg: PointedGraph) -> list[EdgeColoring]:
    g = Graph(pg.labels, pg.edges)
    if not pg.edges:
        return []
    bccs, _cuts = biconnected_components(g)
    parent_bcc = _bcc_parents(pg, bccs)
    out = []
    for assignment in product(range(1, len(bccs) + 1), repeat=len(bccs)):
        image = set(assignment)
        if image != set(range(1, max(image) + 1)):
            continue
        color = dict(zip(range(len(bccs)), assignment))
        ok = all(
            color[i] >= color[j]
            for i, j in parent_bcc.items()
            if j is not None
        )
        if not ok:
            continue
        cmap = {e: color[i] for i, (_, es) in enumerate(bccs) for e in es}
        if _pgraph_pieces(pg, cmap) is None:
            continue
        out.append(EdgeColoring.of(cmap))
    return out


def _bcc_parents(pg: PointedGraph, bccs) -> dict:
    """Parent biconnected component towards the base point, or None next to it.

    The block-cut structure of a connected graph is a tree; rooting it at the
    base point gives each component the neighbour through which the point is
    reached.  Colors must weakly increase along parent-to-child chains.
    """
    vertex_bccs: dict = {v: [] for v in pg.labels}
    for i, (vs, _) in enumerate(bccs):
        for v in vs:
            vertex_bccs[v].append(i)
    parent: dict = {}
    queue = []
    for i in vertex_bccs[pg.point]:
        parent[i] = None
        queue.append(i)
    while queue:
        i = queue.pop(0)
        vs, _ = bccs[i]
        for v in sorted_labels(vs):
            for j in vertex_bccs[v]:
                if j not in parent:
                    parent[j] = i
                    queue.append(j)
    return parent


def _pgraph_pieces(pg: PointedGraph, cmap: dict):
    """Pointed components per color, or None if the coloring is inadmissible."""
    k = max(cmap.values())
    by_level = []
    for i in range(1, k + 1):
        edges = frozenset(e for e, c in cmap.items() if c == i)
        comps = [
            (vs, es) for vs, es in _components(pg.labels, edges) if es
        ]
        by_level.append(comps)
    # level 1 must be one component containing the point
    if len(by_level[0]) != 1 or pg.point not in by_level[0][0][0]:
        return None
    pieces = [[PointedGraph(by_level[0][0][0], by_level[0][0][1], pg.point)]]
    for i in range(2, k + 1):
        lower = frozenset().union(*[vs for vs, _ in by_level[i - 2]])
        level_pieces = []
        for vs, es in by_level[i - 1]:
            anchors = sorted_labels(vs & lower)
            if not anchors:
                return None
            if len(anchors) > 1:
                raise ShapeMismatch("ambiguous distinguished cutpoint in a coloring")
            level_pieces.append(PointedGraph(vs, es, anchors[0]))
        if not level_pieces:
            return None
        pieces.append(level_pieces)
    return pieces


# ---------------------------------------------------------------------------
# coloration antipodes


def antipode_colorings(ctx: HopfContext, key) -> Polynomial:
    """Antipode by the species-specific admissible-coloration formulas."""
    if key.is_singleton:
        return Polynomial.one()
    sp = ctx.operad.species
    rep = ctx.representative(key)
    tag = sp.tag
    if tag in ("tree", "ptree"):
        return _antipode_tree_colorings(ctx, rep)
    if tag == "graph":
        return _antipode_graph_colorings(ctx, rep)
    if tag == "pgraph":
        return _antipode_pgraph_colorings(ctx, rep)
    raise SpeciesMismatch(f"no coloration antipode for species {tag}")


def _tree_color_components(m, cmap: dict):
    """Rooted (or planar) subtrees induced by each color class."""
    planar = isinstance(m, PlanarTree)
    rooted = m.to_rooted() if planar else m
    comps = []
    k = max(cmap.values())
    for i in range(1, k + 1):
        edges = frozenset(e for e, c in cmap.items() if c == i)
        for vs, es in _components(rooted.labels, edges):
            if not es:
                continue
            w = next(
                v for v in sorted_labels(vs) if rooted.parent_map.get(v) not in vs
            )
            parent = {v: rooted.parent_map[v] for v in vs if v != w}
            if planar:
                order = {
                    v: tuple(c for c in m.fiber_order(v) if c in vs)
                    for v in vs
                }
                comps.append((i, PlanarTree.of(w, order)))
            else:
                comps.append((i, RootedTree.of(w, parent)))
    return comps


def _antipode_tree_colorings(ctx: HopfContext, rep) -> Polynomial:
    sp = ctx.operad.species
    total = Polynomial.zero()
    for coloring in admissible_colorings(ctx.operad, rep):
        cmap = coloring.as_dict()
        comps = _tree_color_components(rep, cmap)
        term = Polynomial.constant((-1) ** len(comps))
        for _, sub in comps:
            term = term * Polynomial.generator(sp.key(sub))
        total = total + term
    return total


def _antipode_graph_colorings(ctx: HopfContext, rep: Graph) -> Polynomial:
    sp = ctx.operad.species
    total = Polynomial.zero()
    for coloring in admissible_colorings(ctx.operad, rep):
        quotients = _graph_level_quotients(rep, coloring.as_dict())
        term = Polynomial.one()
        for level_terms in quotients:
            term = term.scale((-1) ** len(level_terms))
            for q in level_terms:
                term = term * Polynomial.generator(sp.key(q))
        total = total + term
    return total


def _antipode_pgraph_colorings(ctx: HopfContext, rep: PointedGraph) -> Polynomial:
    sp = ctx.operad.species
    total = Polynomial.zero()
    for coloring in admissible_colorings(ctx.operad, rep):
        pieces = _pgraph_pieces(rep, coloring.as_dict())
        term = Polynomial.one()
        for level in pieces:
            term = term.scale((-1) ** len(level))
            for p in level:
                term = term * Polynomial.generator(sp.key(p))
        total = total + term
    return total


# ---------------------------------------------------------------------------
# graph helpers used by the Gr and Grp formulas


def graph_modules_and_quotient(g: Graph, block: frozenset):
    """Module test (all-or-nothing outside adjacency) and the contraction.

    The quotient is returned in every case; it is a valid operadic quotient
    only when ``block`` is a module whose induced subgraph is connected.
    """
    adj = _adjacency(g.labels, g.edges)
    others = g.labels - block
    is_module = True
    for v in sorted_labels(others):
        seen = adj[v] & block
        if seen and seen != block:
            is_module = False
            break
    vertices = {frozenset((v,)) for v in others} | {frozenset(block)}
    qedges = set()
    for e in g.edges:
        u, v = tuple(e)
        bu = frozenset(block) if u in block else frozenset((u,))
        bv = frozenset(block) if v in block else frozenset((v,))
        if bu != bv:
            qedges.add(_edge(bu, bv))
    return is_module, Graph(frozenset(vertices), frozenset(qedges))


def biconnected_components(g):
    """Biconnected components (as (vertices, edges) pairs) and the cutpoints."""
    if isinstance(g, PointedGraph):
        g = Graph(g.labels, g.edges)
    adj = {v: sorted_labels(ws) for v, ws in _adjacency(g.labels, g.edges).items()}
    index: dict = {}
    low: dict = {}
    stack: list = []
    comps: list = []
    cutpoints: set = set()
    counter = [0]

    def dfs(v, parent):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        child_count = 0
        for w in adj[v]:
            if w == parent:
                continue
            e = _edge(v, w)
            if w not in index:
                stack.append(e)
                child_count += 1
                dfs(w, v)
                low[v] = min(low[v], low[w])
                if (parent is None and child_count > 1) or (
                    parent is not None and low[w] >= index[v]
                ):
                    cutpoints.add(v)
                if low[w] >= index[v]:
                    comp = set()
                    while True:
                        top = stack.pop()
                        comp.add(top)
                        if top == e:
                            break
                    comps.append(comp)
            elif index[w] < index[v]:
                stack.append(e)
                low[v] = min(low[v], index[w])

    root = sorted_labels(g.labels)[0]
    dfs(root, None)
    if stack:
        comps.append(set(stack))
    out = []
    for comp in comps:
        vs = frozenset(v for e in comp for v in e)
        out.append((vs, frozenset(comp)))
    out.sort(key=lambda c: tuple(label_key(v) for v in sorted_labels(c[0])))
    return out, cutpoints
