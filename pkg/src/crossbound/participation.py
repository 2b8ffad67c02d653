"""Participation and temporal-organization measures over discussions."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .ingest import Message, ParticipantId, Role
from .threads import DAY, Discussion

__all__ = [
    "Regularity",
    "Category",
    "ParticipationProfile",
    "ParallelPair",
    "TimelineRecord",
    "DESIGN_STAGES",
    "UNLABELED",
    "participation_counts",
    "message_counts",
    "third_quartile",
    "classify_regularity",
    "common_participants",
    "find_parallel_discussions",
    "cross_participants",
    "participation_profiles",
    "involvement_by_category",
    "involvement_rollups",
    "mean_opening_delay",
    "group_by_design_step",
    "build_timeline",
]


class Regularity(str, Enum):
    REGULAR = "Regular"
    OCCASIONAL = "Occasional"


class Category(str, Enum):
    PROJECT_LEADER = "ProjectLeader"
    CROSS = "CrossParticipant"
    COMMON_ONLY = "CommonOnly"
    REGULAR_ONLY = "RegularOnly"
    OCCASIONAL_ONLY = "OccasionalOnly"


DESIGN_STAGES = (
    "elicitation of needs",
    "proposals",
    "pre-PEP",
    "PEP design",
    "refinements",
    "valorisation of the implemented module",
    "tutorials",
    "debug and evolution",
)
UNLABELED = "Unlabeled"


@dataclass(frozen=True)
class ParticipationProfile:
    participant: ParticipantId
    per_list_discussion_count: Mapping[str, int]
    per_list_message_count: Mapping[str, int]
    regularity: Mapping[str, Regularity]
    is_common: bool
    is_cross: bool
    category: Category


@dataclass(frozen=True)
class ParallelPair:
    discussion_a: str
    discussion_b: str
    subject_key: str
    overlap: tuple[int, int]


@dataclass(frozen=True)
class TimelineRecord:
    discussion_id: str
    list_id: str
    start: int
    end: int
    label: str
    group: str | None = None
    parallel_with: tuple[str, ...] = field(default=())

    def as_dict(self) -> dict:
        return {
            "discussion_id": self.discussion_id,
            "list_id": self.list_id,
            "start": self.start,
            "end": self.end,
            "label": self.label,
            "group": self.group,
            "parallel_with": list(self.parallel_with),
        }


def _check_list(discussions: Iterable[Discussion], list_id: str | None) -> list[Discussion]:
    ds = list(discussions)
    if list_id is not None:
        stray = [d.discussion_id for d in ds if d.list_id != list_id]
        if stray:
            raise ValueError(f"discussions {stray[:3]} do not belong to {list_id!r}")
    return ds


def participation_counts(
    discussions: Iterable[Discussion], list_id: str | None = None
) -> dict[ParticipantId, int]:
    """Number of distinct discussions each participant posted in."""
    counts: Counter = Counter()
    for d in _check_list(discussions, list_id):
        counts.update(d.participants)
    return dict(counts)


def message_counts(
    discussions: Iterable[Discussion], list_id: str | None = None
) -> dict[ParticipantId, int]:
    counts: Counter = Counter()
    for d in _check_list(discussions, list_id):
        counts.update(m.sender for m in d.messages)
    return dict(counts)


def third_quartile(counts: Iterable[int]) -> int:
    """Nearest-rank 75th percentile: the ceil(0.75 n)-th smallest value."""
    values = sorted(counts)
    if not values:
        raise ValueError("third_quartile of an empty multiset")
    rank = (3 * len(values) + 3) // 4
    return values[rank - 1]


def classify_regularity(counts: Mapping[ParticipantId, int]) -> dict[ParticipantId, Regularity]:
    """Regular iff a participant's count is strictly above the list's Q3."""
    if not counts:
        return {}
    q3 = third_quartile(counts.values())
    return {
        p: Regularity.REGULAR if n > q3 else Regularity.OCCASIONAL for p, n in counts.items()
    }


def common_participants(discussions_by_list: Mapping[str, Iterable[Discussion]]) -> frozenset[ParticipantId]:
    """Participants present in every configured list (normally two)."""
    if len(discussions_by_list) < 2:
        raise ValueError("common participants need at least two lists")
    sets = [
        frozenset(p for d in ds for p in d.participants)
        for ds in discussions_by_list.values()
    ]
    return frozenset.intersection(*sets)


def _jaccard(a: str, b: str) -> float:
    ta, tb = set(a.split()), set(b.split())
    if not ta and not tb:
        return 1.0
    return len(ta & tb) / len(ta | tb)


def find_parallel_discussions(
    discussions_a: Sequence[Discussion],
    discussions_b: Sequence[Discussion],
    *,
    jaccard_threshold: float | None = None,
) -> list[ParallelPair]:
    """Same-subject discussions of two lists whose intervals intersect.

    Subjects match exactly by default; with *jaccard_threshold* set,
    token-set Jaccard similarity at or above the threshold also matches.
    """
    pairs = []
    for a in discussions_a:
        for b in discussions_b:
            if a.list_id == b.list_id:
                raise ValueError("parallel discussions must come from distinct lists")
            same = a.subject_key == b.subject_key
            if not same and jaccard_threshold is not None:
                same = _jaccard(a.subject_key, b.subject_key) >= jaccard_threshold
            if not same:
                continue
            if a.start <= b.end and b.start <= a.end:
                pairs.append(
                    ParallelPair(
                        a.discussion_id,
                        b.discussion_id,
                        a.subject_key,
                        (max(a.start, b.start), min(a.end, b.end)),
                    )
                )
    pairs.sort(key=lambda p: (p.overlap, p.discussion_a, p.discussion_b))
    return pairs


def cross_participants(
    pairs: Iterable[ParallelPair], discussions: Iterable[Discussion]
) -> frozenset[ParticipantId]:
    """Participants who posted in both members of at least one pair."""
    by_id = {d.discussion_id: d for d in discussions}
    out: set[ParticipantId] = set()
    for pair in pairs:
        out |= by_id[pair.discussion_a].participants & by_id[pair.discussion_b].participants
    return frozenset(out)


def participation_profiles(
    discussions_by_list: Mapping[str, Sequence[Discussion]],
    pairs: Iterable[ParallelPair] = (),
) -> list[ParticipationProfile]:
    """Profiles for every participant active on any list, sorted by name."""
    disc_counts = {lid: participation_counts(ds, lid) for lid, ds in discussions_by_list.items()}
    msg_counts = {lid: message_counts(ds, lid) for lid, ds in discussions_by_list.items()}
    regularity = {lid: classify_regularity(c) for lid, c in disc_counts.items()}
    common = (
        common_participants(discussions_by_list) if len(discussions_by_list) >= 2 else frozenset()
    )
    every = [d for ds in discussions_by_list.values() for d in ds]
    cross = cross_participants(pairs, every)

    people = {p for c in disc_counts.values() for p in c}
    profiles = []
    for p in sorted(people, key=lambda x: (x.canonical_name, x.role.value)):
        reg = {lid: r[p] for lid, r in regularity.items() if p in r}
        if p.role is Role.PROJECT_LEADER:
            cat = Category.PROJECT_LEADER
        elif p in cross:
            cat = Category.CROSS
        elif p in common:
            cat = Category.COMMON_ONLY
        elif Regularity.REGULAR in reg.values():
            cat = Category.REGULAR_ONLY
        else:
            cat = Category.OCCASIONAL_ONLY
        profiles.append(
            ParticipationProfile(
                participant=p,
                per_list_discussion_count={lid: c[p] for lid, c in disc_counts.items() if p in c},
                per_list_message_count={lid: c[p] for lid, c in msg_counts.items() if p in c},
                regularity=reg,
                is_common=p in common,
                is_cross=p in cross,
                category=cat,
            )
        )
    return profiles


def _tally(profiles: Sequence[ParticipationProfile], messages: Iterable[Message]) -> dict:
    known = {pr.participant for pr in profiles}
    tally: dict[tuple[ParticipantId, str], int] = Counter()
    for m in messages:
        if m.sender not in known:
            raise ValueError(f"sender {m.sender} of {m.message_id} has no profile")
        tally[(m.sender, m.list_id)] += 1
    return tally


def _means(groups: Mapping[tuple, list[int]]) -> dict:
    return {key: sum(v) / len(v) for key, v in sorted(groups.items()) if v}


def involvement_by_category(
    profiles: Sequence[ParticipationProfile], messages: Iterable[Message]
) -> dict[tuple[Category, str], float]:
    """Mean messages per active member, per (exclusive category, list).

    Categories without an active member on a list are absent.
    """
    category = {pr.participant: pr.category for pr in profiles}
    groups: dict[tuple[Category, str], list[int]] = defaultdict(list)
    for (p, lid), n in _tally(profiles, messages).items():
        groups[(category[p], lid)].append(n)
    return _means(groups)


def involvement_rollups(
    profiles: Sequence[ParticipationProfile], messages: Iterable[Message]
) -> dict[tuple[str, str], float]:
    """Overlapping roll-up rows: Common (cross included), Cross, and
    Regular / Occasional by that list's regularity; the project leader is
    excluded from every roll-up."""
    by_p = {pr.participant: pr for pr in profiles}
    groups: dict[tuple[str, str], list[int]] = defaultdict(list)
    for (p, lid), n in _tally(profiles, messages).items():
        pr = by_p[p]
        if pr.category is Category.PROJECT_LEADER:
            continue
        if pr.is_common:
            groups[("Common", lid)].append(n)
        if pr.is_cross:
            groups[("Cross", lid)].append(n)
        groups[(pr.regularity[lid].value, lid)].append(n)
    return _means(groups)


def mean_opening_delay(discussions: Iterable[Discussion]) -> float | None:
    """Mean gap in days between consecutive discussion start dates, or
    ``None`` with fewer than two discussions."""
    starts = sorted(d.start for d in discussions)
    if len(starts) < 2:
        return None
    total = sum(b - a for a, b in zip(starts, starts[1:]))
    return float(Fraction(total, (len(starts) - 1) * DAY))


def group_by_design_step(
    discussions: Iterable[Discussion],
    stage_lexicon: Mapping[str, Iterable[str]],
    overrides: Mapping[str, str] | None = None,
    stages: Iterable[str] | None = None,
) -> dict[str, list[str]]:
    """Tag discussions with the first stage whose keyword occurs in their
    subject key; *overrides* (discussion id -> stage) always win."""
    ds = list(discussions)
    if stages is not None:
        stages = set(stages)
        unknown = set(stage_lexicon) - stages
        if unknown:
            raise ValueError(f"lexicon stages {sorted(unknown)} are not configured")
    known_stages = set(stages if stages is not None else DESIGN_STAGES) | set(stage_lexicon)
    overrides = dict(overrides or {})
    ids = {d.discussion_id for d in ds}
    for did, stage in overrides.items():
        if did not in ids:
            raise ValueError(f"override for unknown discussion {did!r}")
        if stage not in known_stages:
            raise ValueError(f"override uses unknown stage {stage!r}")

    lexicon = [(stage, [k.lower() for k in kws]) for stage, kws in stage_lexicon.items()]
    groups: dict[str, list[str]] = {}
    for d in ds:
        stage = overrides.get(d.discussion_id)
        if stage is None:
            stage = next(
                (s for s, kws in lexicon if any(k in d.subject_key for k in kws)), UNLABELED
            )
        groups.setdefault(stage, []).append(d.discussion_id)
    return groups


def build_timeline(
    discussions: Iterable[Discussion],
    pairs: Iterable[ParallelPair] = (),
    groups: Mapping[str, Iterable[str]] | None = None,
) -> list[TimelineRecord]:
    """One record per discussion, sorted by list then start date."""
    partners: dict[str, set[str]] = defaultdict(set)
    for pair in pairs:
        partners[pair.discussion_a].add(pair.discussion_b)
        partners[pair.discussion_b].add(pair.discussion_a)
    group_of = {}
    for stage, ids in (groups or {}).items():
        if stage == UNLABELED:
            continue
        for did in ids:
            group_of[did] = stage
    records = [
        TimelineRecord(
            discussion_id=d.discussion_id,
            list_id=d.list_id,
            start=d.start,
            end=d.end,
            label=group_of.get(d.discussion_id) or d.messages[0].subject_raw or d.subject_key,
            group=group_of.get(d.discussion_id),
            parallel_with=tuple(sorted(partners.get(d.discussion_id, ()))),
        )
        for d in discussions
    ]
    records.sort(key=lambda r: (r.list_id, r.start, r.discussion_id))
    return records
