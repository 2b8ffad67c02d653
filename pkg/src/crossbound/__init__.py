"""crossbound: who talks where, and who quotes whom, across a user list
and a developer list while a feature is being designed."""

from .analysis import analyze_corpus
from .attraction import (
    DEFAULT_SCHEME,
    AttractionEdge,
    ContingencyTable,
    RDMatrix,
    attraction_category,
    attraction_edges,
    contingency_by_category,
    relative_deviation,
    to_dot,
)
from .config import AnalysisConfig, ConfigError, InputError, StoreError, Thresholds, load_config
from .ingest import (
    CorpusSelection,
    Diagnostic,
    IngestError,
    Message,
    ParticipantId,
    RevisionRecord,
    Role,
    Roster,
    Space,
    load_roster,
    normalize_subject,
    parse_mbox,
    parse_revision_log,
    resolve_identity,
    select_corpus,
)
from .participation import (
    Category,
    ParallelPair,
    ParticipationProfile,
    Regularity,
    TimelineRecord,
    build_timeline,
    classify_regularity,
    common_participants,
    cross_participants,
    find_parallel_discussions,
    group_by_design_step,
    involvement_by_category,
    involvement_rollups,
    mean_opening_delay,
    message_counts,
    participation_counts,
    participation_profiles,
    third_quartile,
)
from .pipeline import load_bundle, load_store, run_analyze, run_ingest
from .quotes import QuoteBlock, QuoteEdge, attribute_quote_block, build_quote_graph, extract_quote_blocks
from .reports import percent, render_reports, write_reports
from .revisions import (
    ContributionProfile,
    combined_contributions,
    contribution_profiles,
    credited_contributions,
    effective_revision_counts,
    revision_shares,
)
from .threads import Discussion, build_discussions, discussion_interval

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
