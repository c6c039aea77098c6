"""Branch-set minor models with explicit edge witnesses, and their verification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Sequence, Tuple

from ..graph import BoundedDegreeGraph, edge_key, is_connected_set
from .templates import MinorTemplate

PALETTE = (
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33",
    "#a65628", "#f781bf", "#999999", "#66c2a5", "#fc8d62", "#8da0cb",
)


@dataclass(frozen=True)
class MinorEmbedding:
    """Template vertex -> host branch set, template edge -> host witness edge.

    Template edges are keyed as ``(a, b)`` with ``a < b``; the witness is the
    host edge ``(u, v)`` with ``u`` in the branch set of ``a`` and ``v`` in
    that of ``b``.
    """

    branch_sets: Mapping[int, FrozenSet[int]]
    edge_witnesses: Mapping[Tuple[int, int], Tuple[int, int]]
    template_name: str = ""

    def host_vertices(self) -> FrozenSet[int]:
        out: set = set()
        for b in self.branch_sets.values():
            out |= b
        return frozenset(out)

    def relabel(self, mapping: Sequence[int]) -> "MinorEmbedding":
        """Translate host ids through ``mapping`` (e.g. from :func:`induced_subgraph`)."""
        return MinorEmbedding(
            {t: frozenset(mapping[v] for v in b) for t, b in self.branch_sets.items()},
            {e: (mapping[u], mapping[v]) for e, (u, v) in self.edge_witnesses.items()},
            self.template_name,
        )


@dataclass(frozen=True)
class EmbeddingCheck:
    ok: bool
    condition: str = ""
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


ACCEPT = EmbeddingCheck(True)


def verify_embedding(host: BoundedDegreeGraph, template: MinorTemplate, emb: MinorEmbedding) -> EmbeddingCheck:
    """Check the three branch-set conditions; the first violation is reported."""
    tg = template.graph
    for t in range(tg.n):
        b = emb.branch_sets.get(t)
        if not b:
            return EmbeddingCheck(False, "branch-set", f"template vertex {template.label(t)} has no branch set")
        for v in b:
            if not 0 <= v < host.n:
                return EmbeddingCheck(False, "branch-set", f"host vertex {v} out of range")
    extra = set(emb.branch_sets) - set(range(tg.n))
    if extra:
        return EmbeddingCheck(False, "branch-set", f"unknown template vertices {sorted(extra)}")
    owner: Dict[int, int] = {}
    for t in range(tg.n):
        for v in emb.branch_sets[t]:
            if v in owner:
                return EmbeddingCheck(
                    False, "disjointness",
                    f"host vertex {v} in branch sets of {template.label(owner[v])} and {template.label(t)}",
                )
            owner[v] = t
    for t in range(tg.n):
        if not is_connected_set(host, emb.branch_sets[t]):
            return EmbeddingCheck(False, "connectivity", f"branch set of {template.label(t)} is not connected")
    for a, b in tg.edges():
        w = emb.edge_witnesses.get((a, b))
        if w is None:
            return EmbeddingCheck(False, "edge-witness", f"no witness for edge {template.label(a)}-{template.label(b)}")
        u, v = w
        if not (0 <= u < host.n and 0 <= v < host.n) or not host.has_edge(u, v):
            return EmbeddingCheck(False, "edge-witness", f"witness ({u}, {v}) is not a host edge")
        if not ((u in emb.branch_sets[a] and v in emb.branch_sets[b]) or (u in emb.branch_sets[b] and v in emb.branch_sets[a])):
            return EmbeddingCheck(
                False, "edge-witness",
                f"witness ({u}, {v}) does not join {template.label(a)} and {template.label(b)}",
            )
    return ACCEPT


def embedding_from_branch_sets(
    host: BoundedDegreeGraph, template: MinorTemplate, branch_sets: Mapping[int, Iterable[int]]
) -> Optional[MinorEmbedding]:
    """Attach minimum-rank witness edges; ``None`` if some template edge has none."""
    sets = {t: frozenset(b) for t, b in branch_sets.items()}
    witnesses: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for a, b in template.graph.edges():
        best = None
        bb = sets[b]
        for u in sets[a]:
            for v in host.neighbors(u):
                if v in bb:
                    cand = edge_key(u, v)
                    if best is None or cand < best[0]:
                        best = (cand, (u, v))
        if best is None:
            return None
        witnesses[(a, b)] = best[1]
    return MinorEmbedding(sets, witnesses, template.name)


def compose(outer: MinorEmbedding, inner: MinorEmbedding, name: str = "") -> MinorEmbedding:
    """Embedding of H in G from H in K (``inner``) and K in G (``outer``)."""
    sets = {}
    for h, kset in inner.branch_sets.items():
        acc: set = set()
        for kv in kset:
            acc |= outer.branch_sets[kv]
        sets[h] = frozenset(acc)
    wits = {}
    for (a, b), (ku, kv) in inner.edge_witnesses.items():
        key = (ku, kv) if ku < kv else (kv, ku)
        gu, gv = outer.edge_witnesses[key]
        # orient so the first endpoint lies in a's branch set
        if gu in sets[a]:
            wits[(a, b)] = (gu, gv)
        else:
            wits[(a, b)] = (gv, gu)
    return MinorEmbedding(sets, wits, name or inner.template_name)


def format_embedding(template: MinorTemplate, emb: MinorEmbedding) -> str:
    """Text form: one ``branch`` line per template vertex, one ``edge`` line per edge."""
    lines = [f"template {template.name}"]
    for t in range(template.n):
        members = " ".join(str(v) for v in sorted(emb.branch_sets.get(t, ())))
        lines.append(f"branch {template.label(t)} : {members}")
    for a, b in template.graph.edges():
        u, v = emb.edge_witnesses[(a, b)]
        lines.append(f"edge {template.label(a)} {template.label(b)} : {u} {v}")
    return "\n".join(lines) + "\n"


def parse_embedding(text: str, template: MinorTemplate) -> MinorEmbedding:
    index = {template.label(t): t for t in range(template.n)}
    sets: Dict[int, FrozenSet[int]] = {}
    wits: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("template"):
            continue
        head, _, tail = line.partition(":")
        parts = head.split()
        vals = [int(x) for x in tail.split()]
        if parts[0] == "branch":
            sets[index[parts[1]]] = frozenset(vals)
        elif parts[0] == "edge":
            a, b = index[parts[1]], index[parts[2]]
            if a > b:
                a, b = b, a
                vals = vals[::-1]
            wits[(a, b)] = (vals[0], vals[1])
        else:
            raise ValueError(f"bad witness line {raw!r}")
    return MinorEmbedding(sets, wits, template.name)


def embedding_to_dot(host: BoundedDegreeGraph, template: MinorTemplate, emb: MinorEmbedding) -> str:
    """DOT source with each branch set filled in its own color and witnesses bold."""
    color = {}
    for t, b in emb.branch_sets.items():
        for v in b:
            color[v] = PALETTE[t % len(PALETTE)]
    bold = {edge_key(u, v) for u, v in emb.edge_witnesses.values()}
    out = [f"graph {template.name or 'witness'} {{"]
    for v in range(host.n):
        if v in color:
            out.append(f'  {v} [style=filled, fillcolor="{color[v]}"];')
        else:
            out.append(f"  {v};")
    for u, v in host.edges():
        attr = " [penwidth=3]" if (u, v) in bold else ""
        out.append(f"  {u} -- {v}{attr};")
    out.append("}")
    return "\n".join(out) + "\n"
