"""Minor templates, branch-set embeddings, and minor-containment checks."""

from .embedding import (
    EmbeddingCheck,
    MinorEmbedding,
    compose,
    embedding_from_branch_sets,
    embedding_to_dot,
    format_embedding,
    parse_embedding,
    verify_embedding,
)
from .family import ForbiddenFamily, SeparabilityProfile, contains_minor, is_family_minor_free
from .graph_ops import quotient
from .search import SearchTooLarge, find_minor_bruteforce, has_minor_by_contraction
from .templates import (
    MinorTemplate,
    make_circus,
    make_complete,
    make_cycle,
    make_diamond,
    make_grid,
    make_k2k,
    make_path,
    make_star,
    template_from_name,
)

__all__ = [
    "EmbeddingCheck",
    "ForbiddenFamily",
    "MinorEmbedding",
    "MinorTemplate",
    "SearchTooLarge",
    "SeparabilityProfile",
    "compose",
    "contains_minor",
    "embedding_from_branch_sets",
    "embedding_to_dot",
    "find_minor_bruteforce",
    "format_embedding",
    "has_minor_by_contraction",
    "is_family_minor_free",
    "make_circus",
    "make_complete",
    "make_cycle",
    "make_diamond",
    "make_grid",
    "make_k2k",
    "make_path",
    "make_star",
    "parse_embedding",
    "quotient",
    "template_from_name",
    "verify_embedding",
]
