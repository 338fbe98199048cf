"""h-leadership index and companion citation metrics for publication corpora."""

from .corpus import (
    AffiliationConfig,
    AuthorRef,
    Corpus,
    Publication,
    ResearcherProfile,
    author_position,
    load_corpus,
    parse_affiliations_config,
)
from .metrics import (
    AuthorshipBreakdown,
    CScoreComponents,
    MetricsRow,
    authorship_breakdown,
    c_score,
    compute_metrics,
    cscore_components,
    g_index,
    h_index,
    h_leadership_index,
    hfrac_index,
    hm_index,
    i10_index,
    percent_drop,
    publication_stats,
    weighted_citations,
)
from .weights import WeightParams, effective_position, leadership_weight

__version__ = "0.1.0"
