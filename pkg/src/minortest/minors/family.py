"""Forbidden families, their separability profiles, and family minor-freeness."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

from ..graph import BoundedDegreeGraph
from .deciders import decider_for, extract_witness
from .embedding import MinorEmbedding
from .search import DEFAULT_MAX_HOST, SearchTooLarge, find_minor_bruteforce
from .templates import (
    MinorTemplate,
    canonical_form,
    make_circus,
    make_grid,
    make_k2k,
    template_from_name,
)

ALIASES = {
    "outerplanar": "K2_3+K4",
    "cactus": "diamond",
    "series-parallel": "K4",
    "forest": "K3",
}

_MAX_K = {"k2k": 6, "circus": 4, "grid": 5}
_BUILDERS = {"k2k": make_k2k, "circus": make_circus, "grid": make_grid}


def contains_minor(
    host: BoundedDegreeGraph, template: MinorTemplate, max_bruteforce: int = DEFAULT_MAX_HOST
) -> Optional[MinorEmbedding]:
    """Verified embedding or ``None``; uses a structural decider when one exists.

    Raises :class:`SearchTooLarge` when no decider applies and the host is
    above the exhaustive-search guard.
    """
    decide = decider_for(template)
    if decide is None:
        return find_minor_bruteforce(host, template, max_bruteforce)
    emb = extract_witness(host, template, decide)
    if emb is None and host.n <= max_bruteforce and decide({v: set(host.neighbors(v)) for v in range(host.n)}):
        # extraction should not fail after a yes; fall back to exhaustive search
        return find_minor_bruteforce(host, template, max_bruteforce)
    return emb


@dataclass(frozen=True)
class SeparabilityProfile:
    """Family member ``member`` is a minor of ``host_template`` (a K_{2,k}, k-circus or grid).

    Graphs excluding the member therefore exclude ``host_template`` and are
    (f, g)-separable with the bounds below.
    """

    kind: str
    k: int
    member: MinorTemplate
    host_template: MinorTemplate
    member_in_host: MinorEmbedding = field(compare=False)

    def f(self, delta: int, h: int, n: int) -> float:
        if self.kind == "k2k":
            return 2 * delta * self.k * h
        if self.kind == "circus":
            return _safe_pow_mul(2 * h, delta, 2 + self.k ** 2)
        inner = (self.k ** 2 + 1) * math.log(max(delta, 1))
        if inner > 700:
            return math.inf
        expo = 1 + math.exp(inner)
        if expo * math.log(max(delta, 1)) > 700:
            return math.inf
        return float(delta) ** expo

    def g(self, h: int, n: int) -> int:
        return n if self.kind == "grid" else h


def _safe_pow_mul(c: float, base: int, expo: int) -> float:
    if base <= 1:
        return float(c)
    if expo * math.log(base) > 700:
        return math.inf
    return c * float(base) ** expo


@lru_cache(maxsize=None)
def _minimal_host(kind: str, member_key) -> Optional[Tuple[int, MinorEmbedding]]:
    member = _MEMBERS[member_key]
    for k in range(1, _MAX_K[kind] + 1):
        host = _BUILDERS[kind](k)
        if host.graph.n < member.n or host.graph.m < member.graph.m:
            continue
        emb = contains_minor(host.graph, member)
        if emb is not None:
            return k, emb
    return None


_MEMBERS = {}


def profiles_for(member: MinorTemplate) -> List[SeparabilityProfile]:
    key = canonical_form(member.graph)
    _MEMBERS.setdefault(key, member)
    out = []
    for kind in ("k2k", "circus", "grid"):
        found = _minimal_host(kind, key)
        if found is not None:
            k, emb = found
            # re-key the cached embedding onto this member's own labelling
            canon_member = _MEMBERS[key]
            if canon_member is not member:
                emb = _transfer(emb, canon_member, member)
            out.append(SeparabilityProfile(kind, k, member, _BUILDERS[kind](k), emb))
    return out


def _transfer(emb: MinorEmbedding, src: MinorTemplate, dst: MinorTemplate) -> MinorEmbedding:
    from .templates import find_isomorphism

    iso = find_isomorphism(src.graph, dst.graph)  # V(dst) -> V(src)
    assert iso is not None
    sets = {d: emb.branch_sets[s] for d, s in iso.items()}
    wits = {}
    for a, b in dst.graph.edges():
        sa, sb = iso[a], iso[b]
        key = (sa, sb) if sa < sb else (sb, sa)
        u, v = emb.edge_witnesses[key]
        wits[(a, b)] = (u, v) if u in sets[a] else (v, u)
    return MinorEmbedding(sets, wits, dst.name)


@dataclass
class ForbiddenFamily:
    members: List[MinorTemplate]
    name: str = ""
    profiles: List[SeparabilityProfile] = field(default_factory=list)

    def __post_init__(self):
        if not self.members:
            raise ValueError("forbidden family must be nonempty")
        if not self.name:
            self.name = "+".join(m.name for m in self.members)
        if not self.profiles:
            for m in self.members:
                self.profiles.extend(profiles_for(m))

    @classmethod
    def parse(cls, spec: str) -> "ForbiddenFamily":
        """``"K2_3+K4"``, ``"diamond"`` or an alias such as ``"outerplanar"``."""
        expanded = ALIASES.get(spec.strip().lower(), spec)
        members = [template_from_name(tok) for tok in expanded.replace(",", "+").split("+") if tok.strip()]
        return cls(members, name=spec.strip())

    def separability_profile(self, delta: int, h: int, n: int) -> Optional[SeparabilityProfile]:
        """The profile with the smallest cut bound ``f`` at these parameters, with ``g >= h``."""
        best = None
        for p in self.profiles:
            if p.g(h, n) < h:
                continue
            key = (p.f(delta, h, n), p.kind, p.k)
            if best is None or key < best[0]:
                best = (key, p)
        return best[1] if best else None

    def is_minor_free(self, host: BoundedDegreeGraph, max_bruteforce: int = DEFAULT_MAX_HOST):
        return is_family_minor_free(host, self, max_bruteforce)


def is_family_minor_free(
    host: BoundedDegreeGraph, family: ForbiddenFamily, max_bruteforce: int = DEFAULT_MAX_HOST
) -> Tuple[bool, Optional[Tuple[MinorTemplate, MinorEmbedding]]]:
    """``(True, None)`` if no member embeds, else ``(False, (member, embedding))``."""
    for member in family.members:
        emb = contains_minor(host, member, max_bruteforce)
        if emb is not None:
            return False, (member, emb)
    return True, None


__all__ = [
    "ForbiddenFamily",
    "SeparabilityProfile",
    "SearchTooLarge",
    "contains_minor",
    "is_family_minor_free",
    "profiles_for",
]
