"""Documentation and implementation revisions: who committed what, and
who was credited for it."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .ingest import ParticipantId, RevisionRecord, Space
from .threads import Discussion

__all__ = [
    "ContributionProfile",
    "effective_revision_counts",
    "revision_shares",
    "credited_contributions",
    "combined_contributions",
    "contribution_profiles",
]


@dataclass(frozen=True)
class ContributionProfile:
    participant: ParticipantId
    discussion_messages: Mapping[str, int] = field(default_factory=dict)
    doc_revisions_effective: int = 0
    doc_revisions_credited: int = 0
    impl_revisions_effective: int = 0
    impl_revisions_credited: int = 0


def _in_space(records: Iterable[RevisionRecord], space: Space | str | None) -> list[RevisionRecord]:
    if space is None:
        return list(records)
    space = Space(space)
    return [r for r in records if r.space is space]


def effective_revision_counts(
    records: Iterable[RevisionRecord], space: Space | str | None = None
) -> dict[ParticipantId, int]:
    """Revisions committed by each participant within *space*."""
    return dict(Counter(r.committer for r in _in_space(records, space)))


def revision_shares(counts: Mapping[ParticipantId, int]) -> dict[ParticipantId, float]:
    """Each participant's fraction of all counted revisions."""
    total = sum(counts.values())
    if not total:
        return {}
    return {p: float(Fraction(n, total)) for p, n in counts.items()}


def credited_contributions(
    records: Iterable[RevisionRecord], space: Space | str | None = None
) -> dict[ParticipantId, int]:
    """Revisions in which each participant is credited by the log message.

    A revision crediting several people counts once for each of them.
    """
    counts: Counter = Counter()
    for r in _in_space(records, space):
        counts.update(r.credited)
    return dict(counts)


def combined_contributions(
    records: Iterable[RevisionRecord], space: Space | str | None = None
) -> dict[ParticipantId, int]:
    records = _in_space(records, space)
    total = Counter(effective_revision_counts(records))
    total.update(credited_contributions(records))
    return dict(total)


def contribution_profiles(
    participants: Iterable[ParticipantId],
    discussions: Iterable[Discussion],
    records: Sequence[RevisionRecord],
) -> list[ContributionProfile]:
    """Join discussion activity with revision activity.

    Every participant given explicitly, posting a message, committing or
    being credited gets exactly one profile; profiles are sorted by name.
    """
    msgs: dict[ParticipantId, Counter] = {}
    for d in discussions:
        for m in d.messages:
            msgs.setdefault(m.sender, Counter())[m.list_id] += 1
    doc_eff = effective_revision_counts(records, Space.DOCUMENTATION)
    doc_cred = credited_contributions(records, Space.DOCUMENTATION)
    impl_eff = effective_revision_counts(records, Space.IMPLEMENTATION)
    impl_cred = credited_contributions(records, Space.IMPLEMENTATION)

    everyone = set(participants) | set(msgs)
    for table in (doc_eff, doc_cred, impl_eff, impl_cred):
        everyone |= table.keys()
    return [
        ContributionProfile(
            participant=p,
            discussion_messages=dict(sorted(msgs.get(p, Counter()).items())),
            doc_revisions_effective=doc_eff.get(p, 0),
            doc_revisions_credited=doc_cred.get(p, 0),
            impl_revisions_effective=impl_eff.get(p, 0),
            impl_revisions_credited=impl_cred.get(p, 0),
        )
        for p in sorted(everyone, key=lambda x: (x.canonical_name, x.role.value))
    ]
