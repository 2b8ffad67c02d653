"""Compose every metric for one corpus into a JSON-ready bundle section."""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .attraction import (
    DEFAULT_SCHEME,
    attraction_category,
    attraction_edges,
    contingency_by_category,
    relative_deviation,
)
from .config import Thresholds
from .ingest import ParticipantId, RevisionRecord, Space
from .participation import (
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
from .quotes import QuoteEdge, build_quote_graph
from .revisions import contribution_profiles, credited_contributions, effective_revision_counts
from .threads import Discussion

__all__ = ["analyze_corpus", "BUNDLE_SCHEMA_VERSION"]

BUNDLE_SCHEMA_VERSION = 1


def _names(people) -> list[str]:
    return sorted(p.canonical_name for p in people)


def _by_name(mapping: Mapping[ParticipantId, object]) -> dict:
    return {p.canonical_name: v for p, v in sorted(mapping.items(), key=lambda kv: kv[0].canonical_name)}


def _matrix(a: np.ndarray) -> list[list]:
    return [[None if np.isnan(v) else float(v) for v in row] for row in np.asarray(a, dtype=float)]


def _table_section(edges: Sequence[QuoteEdge], category_of, lists, labels, thresholds: Thresholds, list_id=None):
    table = contingency_by_category(edges, category_of, lists, labels)
    section = {
        "counts": table.counts.astype(int).tolist(),
        "total": table.total,
        "unresolved": table.unresolved,
        "expected": None,
        "rd": None,
    }
    attraction = []
    if table.total > 0:
        rd = relative_deviation(table)
        section["expected"] = _matrix(rd.expected)
        section["rd"] = _matrix(rd.values)
        attraction = [
            {"source": e.source, "target": e.target, "weight": e.weight, "count": e.count}
            for e in attraction_edges(rd, thresholds.rd_threshold, thresholds.rd_min_cell, list_id)
        ]
    return section, attraction


def analyze_corpus(
    name: str,
    discussions_by_list: Mapping[str, Sequence[Discussion]],
    revisions: Sequence[RevisionRecord] = (),
    *,
    orientation: Mapping[str, str] | None = None,
    thresholds: Thresholds = Thresholds(),
    labels: Sequence[str] = DEFAULT_SCHEME,
    stage_lexicon: Mapping[str, Sequence[str]] | None = None,
    stage_overrides: Mapping[str, str] | None = None,
    stages: Sequence[str] | None = None,
) -> dict:
    """Bundle section for one corpus.

    ``metrics`` holds every measured quantity; ``timeline``,
    ``design_steps``, ``quote_edges`` and ``contributions`` carry the
    records needed to render reports.
    """
    list_ids = sorted(discussions_by_list)
    if len(list_ids) != 2:
        raise ValueError("a corpus is analysed over exactly two lists")
    orientation = dict(orientation or {})
    every = [d for lid in list_ids for d in discussions_by_list[lid]]

    lists_section = {}
    for lid in list_ids:
        ds = discussions_by_list[lid]
        disc = participation_counts(ds, lid)
        msgs = message_counts(ds, lid)
        reg = classify_regularity(disc)
        delay = mean_opening_delay(ds)
        lists_section[lid] = {
            "orientation": orientation.get(lid),
            "n_discussions": len(ds),
            "n_participants": len(disc),
            "n_messages": sum(len(d) for d in ds),
            "discussion_counts": _by_name(disc),
            "message_counts": _by_name(msgs),
            "q3": third_quartile(disc.values()) if disc else None,
            "regular": _names(p for p, r in reg.items() if r.value == "Regular"),
            "occasional": _names(p for p, r in reg.items() if r.value == "Occasional"),
            "mean_opening_delay_days": delay,
        }

    a, b = (discussions_by_list[lid] for lid in list_ids)
    pairs = find_parallel_discussions(a, b, jaccard_threshold=thresholds.subject_fuzzy)
    common = common_participants(discussions_by_list)
    cross = cross_participants(pairs, every)
    profiles = participation_profiles(discussions_by_list, pairs)
    all_messages = [m for d in every for m in d.messages]
    involvement = involvement_by_category(profiles, all_messages)
    rollups = involvement_rollups(profiles, all_messages)

    edges = build_quote_graph(
        None,
        every,
        min_chars=thresholds.quote_min_chars,
        min_tokens=thresholds.quote_min_tokens,
        fuzzy=thresholds.quote_fuzzy,
        fuzzy_ratio=thresholds.quote_fuzzy_ratio,
    )
    people = {pr.participant for pr in profiles} | {e.quoted for e in edges if e.resolved}
    category_of = {p: attraction_category(p, cross) for p in people}
    pooled, pooled_edges = _table_section(edges, category_of, None, labels, thresholds)
    contingency = {"labels": list(labels), "pooled": pooled, "by_list": {}}
    attraction = {"pooled": pooled_edges, "by_list": {}}
    for lid in list_ids:
        section, lid_edges = _table_section(edges, category_of, [lid], labels, thresholds, lid)
        contingency["by_list"][lid] = section
        attraction["by_list"][lid] = lid_edges

    rev_section = {}
    for space in Space:
        recs = [r for r in revisions if r.space is space]
        rev_section[space.value] = {
            "n_records": len(recs),
            "effective": _by_name(effective_revision_counts(recs)),
            "credited": _by_name(credited_contributions(recs)),
        }

    groups = group_by_design_step(every, stage_lexicon or {}, stage_overrides, stages)
    timeline = build_timeline(every, pairs, groups)
    contributions = contribution_profiles((), every, list(revisions))

    metrics = {
        "lists": lists_section,
        "n_participants": len({p for d in every for p in d.participants}),
        "pooled_mean_opening_delay_days": mean_opening_delay(every),
        "parallel_pairs": sorted([p.discussion_a, p.discussion_b] for p in pairs),
        "common": _names(common),
        "cross": _names(cross),
        "categories": {pr.participant.canonical_name: pr.category.value for pr in profiles},
        "involvement": _nest(involvement),
        "involvement_rollups": _nest(rollups),
        "quotes": {
            "n_edges": len(edges),
            "n_resolved": sum(e.resolved for e in edges),
            "n_unresolved": sum(not e.resolved for e in edges),
            "n_self": sum(e.self_quote for e in edges),
        },
        "attraction_categories": _by_name(category_of),
        "contingency": contingency,
        "attraction": attraction,
        "revisions": rev_section,
    }
    roles = {pr.participant.canonical_name: pr.participant.role.value for pr in profiles}
    return {
        "name": name,
        "metrics": metrics,
        "timeline": [r.as_dict() for r in timeline],
        "design_steps": {k: sorted(v) for k, v in sorted(groups.items())},
        "quote_edges": [
            dict(e.as_record(), block=e.block_index)
            for e in sorted(edges, key=lambda e: (e.quoter_message, e.block_index))
        ],
        "contributions": [
            {
                "participant": c.participant.canonical_name,
                "role": roles.get(c.participant.canonical_name, c.participant.role.value),
                "messages": dict(c.discussion_messages),
                "doc_eff": c.doc_revisions_effective,
                "doc_cred": c.doc_revisions_credited,
                "impl_eff": c.impl_revisions_effective,
                "impl_cred": c.impl_revisions_credited,
            }
            for c in contributions
        ],
    }


def _nest(flat: Mapping[tuple, float]) -> dict:
    out: dict = {}
    for (cat, lid), v in sorted(flat.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
        out.setdefault(getattr(cat, "value", cat), {})[lid] = v
    return out
