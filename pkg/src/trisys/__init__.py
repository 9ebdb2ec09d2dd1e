"""trisys: exact enumeration and randomized verification for triple systems."""

from .core import (
    CanonicalForm,
    ParseError,
    TripleSystem,
    UnsupportedSizeError,
    automorphisms,
    canonical_form,
    canonical_representative,
    is_isomorphic,
    labeled_count,
    parse,
    relabel,
    serialize,
)
from .counting import (
    CountTable,
    EnumRecord,
    brute_force_count,
    extremal_number,
    generate_isofree,
    labeled_total,
    table_from_records,
)
from .partition import (
    LinkProfile,
    LinkSet,
    Partition3,
    PartitionResult,
    is_tripartite,
    link,
    link_profile,
    non_crossing_count,
    optimal_partition,
    recover_partition,
)
from .patterns import (
    PatternHit,
    contains_f5,
    contains_k4minus,
    forced_pair_violation,
    is_cancellative,
)
from .report import RunReport, TOOL_VERSION

__version__ = TOOL_VERSION

__all__ = [
    "CanonicalForm",
    "CountTable",
    "EnumRecord",
    "LinkProfile",
    "LinkSet",
    "Partition3",
    "PartitionResult",
    "ParseError",
    "PatternHit",
    "RunReport",
    "TripleSystem",
    "UnsupportedSizeError",
    "automorphisms",
    "brute_force_count",
    "canonical_form",
    "canonical_representative",
    "contains_f5",
    "contains_k4minus",
    "extremal_number",
    "forced_pair_violation",
    "generate_isofree",
    "is_cancellative",
    "is_isomorphic",
    "is_tripartite",
    "labeled_count",
    "labeled_total",
    "link",
    "link_profile",
    "non_crossing_count",
    "optimal_partition",
    "parse",
    "recover_partition",
    "relabel",
    "serialize",
    "table_from_records",
]
