"""Who-quotes-whom contingency tables, relative deviation and the
category attraction graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Collection, Iterable, Mapping, Sequence

import numpy as np

from .ingest import ParticipantId, Role
from .quotes import QuoteEdge

__all__ = [
    "DEFAULT_SCHEME",
    "ContingencyTable",
    "RDMatrix",
    "AttractionEdge",
    "attraction_category",
    "contingency_by_category",
    "relative_deviation",
    "attraction_edges",
    "to_dot",
]

# users, user-champion, administrators-developers, project leader,
# cross-participants
DEFAULT_SCHEME = ("U", "U-C", "A-D", "PL", "CP")


def attraction_category(p: ParticipantId, cross: Collection[ParticipantId] = frozenset()) -> str:
    """Default category of *p*: roster override, then PL, CP, A-D, U."""
    if p.category:
        return p.category
    if p.role is Role.PROJECT_LEADER:
        return "PL"
    if p in cross:
        return "CP"
    if p.role in (Role.ADMINISTRATOR, Role.DEVELOPER):
        return "A-D"
    return "U"


@dataclass(frozen=True)
class ContingencyTable:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: np.ndarray
    # edges left out because their source message is unknown
    unresolved: int = 0

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class RDMatrix:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: np.ndarray
    expected: np.ndarray
    # NaN where expected == 0
    values: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return self.expected > 0


@dataclass(frozen=True)
class AttractionEdge:
    source: str
    target: str
    weight: float
    count: int
    list_id: str | None = None


def contingency_by_category(
    edges: Iterable[QuoteEdge],
    category_of: Mapping[ParticipantId, str] | Callable[[ParticipantId], str],
    lists: Iterable[str] | None = None,
    labels: Sequence[str] = DEFAULT_SCHEME,
) -> ContingencyTable:
    """Tally resolved edges by (quoter category, quoted category).

    *lists* restricts the tally to edges posted on those lists.
    """
    lookup = category_of if callable(category_of) else category_of.__getitem__
    labels = tuple(labels)
    pos = {lab: i for i, lab in enumerate(labels)}
    wanted = None if lists is None else set(lists)
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    unresolved = 0
    for e in edges:
        if wanted is not None and e.list_id not in wanted:
            continue
        if not e.resolved:
            unresolved += 1
            continue
        src, dst = lookup(e.quoter), lookup(e.quoted)
        if src not in pos or dst not in pos:
            raise ValueError(f"category {src!r} or {dst!r} not in scheme {labels}")
        counts[pos[src], pos[dst]] += 1
    return ContingencyTable(labels, labels, counts, unresolved)


def relative_deviation(table: ContingencyTable) -> RDMatrix:
    """``(observed - expected) / expected`` under row/column independence."""
    counts = np.asarray(table.counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise ValueError("relative deviation of an empty table")
    expected = np.outer(counts.sum(axis=1), counts.sum(axis=0)) / total
    values = np.full_like(expected, np.nan)
    ok = expected > 0
    values[ok] = (counts[ok] - expected[ok]) / expected[ok]
    return RDMatrix(table.row_labels, table.col_labels, np.asarray(table.counts), expected, values)


def attraction_edges(
    rd: RDMatrix, threshold: float = 0.0, min_cell: int = 5, list_id: str | None = None
) -> list[AttractionEdge]:
    """Category pairs with RD above *threshold* and at least *min_cell*
    observations, strongest first."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    out = []
    for i, src in enumerate(rd.row_labels):
        for j, dst in enumerate(rd.col_labels):
            v = rd.values[i, j]
            if np.isnan(v) or v <= threshold or rd.counts[i, j] < min_cell:
                continue
            out.append(AttractionEdge(src, dst, float(v), int(rd.counts[i, j]), list_id))
    out.sort(key=lambda e: (-e.weight, e.source, e.target))
    return out


_LIST_STYLES = ("solid", "dashed", "dotted", "bold")


def to_dot(
    edges_by_list: Mapping[str | None, Sequence[AttractionEdge]],
    labels: Sequence[str] = DEFAULT_SCHEME,
    name: str = "attraction",
) -> str:
    """Render attraction edges as a Graphviz digraph, one line style per list."""
    lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
    for lab in labels:
        lines.append(f'  "{lab}";')
    for k, list_id in enumerate(sorted(edges_by_list, key=lambda x: (x is not None, x or ""))):
        style = _LIST_STYLES[k % len(_LIST_STYLES)]
        tag = f" {list_id}" if list_id else ""
        for e in edges_by_list[list_id]:
            lines.append(
                f'  "{e.source}" -> "{e.target}" '
                f'[label="{e.weight:+.2f}{tag}", style={style}, weight={e.count}];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
