"""Reference metrics computed from ground truth by brute-force enumeration.

Nothing here imports the analysis pipeline: every figure is recomputed
from the planted discussions, quotes and revisions with plain loops, so
agreement between the two is evidence rather than tautology.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Any

from .generator import GroundTruth

__all__ = ["oracle_metrics", "compare_metrics"]

LABELS = ("U", "U-C", "A-D", "PL", "CP")


def _q3(values: list[int]) -> int:
    ordered = sorted(values)
    return ordered[math.ceil(len(ordered) * 3 / 4) - 1]


def _delay(starts: list[int]) -> float | None:
    if len(starts) < 2:
        return None
    ordered = sorted(starts)
    gaps = [ordered[i + 1] - ordered[i] for i in range(len(ordered) - 1)]
    return float(Fraction(sum(gaps), 86400) / len(gaps))


def _mean(xs: list[int]) -> float:
    return sum(xs) / len(xs)


def _rd(counts: list[list[int]]) -> tuple[list, list]:
    n = len(counts)
    total = sum(map(sum, counts))
    rows = [sum(counts[i]) for i in range(n)]
    cols = [sum(counts[i][j] for i in range(n)) for j in range(n)]
    expected = [[rows[i] * cols[j] / total for j in range(n)] for i in range(n)]
    rd = [
        [None if expected[i][j] == 0 else (counts[i][j] - expected[i][j]) / expected[i][j] for j in range(n)]
        for i in range(n)
    ]
    return expected, rd


def oracle_metrics(truth: GroundTruth | dict, *, rd_threshold: float = 0.0, rd_min_cell: int = 5) -> dict:
    """The ``metrics`` mapping the pipeline should produce for *truth*."""
    gt = truth if isinstance(truth, GroundTruth) else GroundTruth.from_dict(truth)
    user, dev = gt.lists["user"], gt.lists["developer"]
    lists = sorted([user, dev])
    roles = dict(gt.posters)
    override = {r["canonical_name"]: r.get("category") for r in gt.roster}

    discs = {lid: [d for d in gt.discussions if d["list_id"] == lid] for lid in lists}
    span = {
        d["discussion_id"]: (min(m["date"] for m in d["messages"]), max(m["date"] for m in d["messages"]))
        for d in gt.discussions
    }
    senders = {d["discussion_id"]: {m["sender"] for m in d["messages"]} for d in gt.discussions}

    section = {}
    for lid in lists:
        disc_count: dict[str, int] = {}
        msg_count: dict[str, int] = {}
        for d in discs[lid]:
            for who in senders[d["discussion_id"]]:
                disc_count[who] = disc_count.get(who, 0) + 1
            for m in d["messages"]:
                msg_count[m["sender"]] = msg_count.get(m["sender"], 0) + 1
        q3 = _q3(list(disc_count.values())) if disc_count else None
        section[lid] = {
            "orientation": "user" if lid == user else "developer",
            "n_discussions": len(discs[lid]),
            "n_participants": len(disc_count),
            "n_messages": sum(len(d["messages"]) for d in discs[lid]),
            "discussion_counts": dict(sorted(disc_count.items())),
            "message_counts": dict(sorted(msg_count.items())),
            "q3": q3,
            "regular": sorted(p for p, n in disc_count.items() if n > q3),
            "occasional": sorted(p for p, n in disc_count.items() if n <= q3),
            "mean_opening_delay_days": _delay([span[d["discussion_id"]][0] for d in discs[lid]]),
        }

    pairs = []
    for a in discs[lists[0]]:
        for b in discs[lists[1]]:
            sa, sb = span[a["discussion_id"]], span[b["discussion_id"]]
            if a["subject_key"] == b["subject_key"] and sa[0] <= sb[1] and sb[0] <= sa[1]:
                pairs.append([a["discussion_id"], b["discussion_id"]])
    pairs.sort()

    on_list = {lid: set(section[lid]["discussion_counts"]) for lid in lists}
    everyone = on_list[lists[0]] | on_list[lists[1]]
    common = on_list[lists[0]] & on_list[lists[1]]
    cross = set()
    for a, b in pairs:
        cross |= senders[a] & senders[b]

    categories = {}
    for p in sorted(everyone):
        if roles[p] == "ProjectLeader":
            categories[p] = "ProjectLeader"
        elif p in cross:
            categories[p] = "CrossParticipant"
        elif p in common:
            categories[p] = "CommonOnly"
        elif any(p in section[lid]["regular"] for lid in lists):
            categories[p] = "RegularOnly"
        else:
            categories[p] = "OccasionalOnly"

    exclusive: dict[str, dict[str, list[int]]] = {}
    rollup: dict[str, dict[str, list[int]]] = {}
    for lid in lists:
        for p, n in section[lid]["message_counts"].items():
            exclusive.setdefault(categories[p], {}).setdefault(lid, []).append(n)
            if categories[p] == "ProjectLeader":
                continue
            kinds = ["Regular" if p in section[lid]["regular"] else "Occasional"]
            if p in common:
                kinds.append("Common")
            if p in cross:
                kinds.append("Cross")
            for k in kinds:
                rollup.setdefault(k, {}).setdefault(lid, []).append(n)

    def attr_cat(p: str) -> str:
        if override.get(p):
            return override[p]
        if roles[p] == "ProjectLeader":
            return "PL"
        if p in cross:
            return "CP"
        if roles[p] in ("Administrator", "Developer"):
            return "A-D"
        return "U"

    attr = {p: attr_cat(p) for p in sorted(everyone | {q["source_sender"] for q in gt.quotes})}

    def table(scope: list[str]):
        idx = {lab: i for i, lab in enumerate(LABELS)}
        counts = [[0] * len(LABELS) for _ in LABELS]
        for q in gt.quotes:
            if q["list_id"] in scope:
                counts[idx[attr[q["quoter"]]]][idx[attr[q["source_sender"]]]] += 1
        total = sum(map(sum, counts))
        sec = {"counts": counts, "total": total, "unresolved": 0, "expected": None, "rd": None}
        edges = []
        if total:
            sec["expected"], sec["rd"] = _rd(counts)
            for i, src in enumerate(LABELS):
                for j, dst in enumerate(LABELS):
                    v = sec["rd"][i][j]
                    if v is not None and v > rd_threshold and counts[i][j] >= rd_min_cell:
                        edges.append({"source": src, "target": dst, "weight": v, "count": counts[i][j]})
            edges.sort(key=lambda e: (-e["weight"], e["source"], e["target"]))
        return sec, edges

    pooled, pooled_edges = table(lists)
    by_list = {lid: table([lid]) for lid in lists}

    revisions = {}
    for space in ("Documentation", "Implementation"):
        recs = [r for r in gt.revisions if r["space"] == space]
        eff: dict[str, int] = {}
        cred: dict[str, int] = {}
        for r in recs:
            eff[r["committer"]] = eff.get(r["committer"], 0) + 1
            for c in r["credited"]:
                cred[c] = cred.get(c, 0) + 1
        revisions[space] = {
            "n_records": len(recs),
            "effective": dict(sorted(eff.items())),
            "credited": dict(sorted(cred.items())),
        }

    return {
        "lists": section,
        "n_participants": len(everyone),
        "pooled_mean_opening_delay_days": _delay([s for s, _ in span.values()]),
        "parallel_pairs": pairs,
        "common": sorted(common),
        "cross": sorted(cross),
        "categories": categories,
        "involvement": {
            c: {lid: _mean(v) for lid, v in sorted(per.items())} for c, per in sorted(exclusive.items())
        },
        "involvement_rollups": {
            c: {lid: _mean(v) for lid, v in sorted(per.items())} for c, per in sorted(rollup.items())
        },
        "quotes": {
            "n_edges": len(gt.quotes),
            "n_resolved": len(gt.quotes),
            "n_unresolved": 0,
            "n_self": sum(q["quoter"] == q["source_sender"] for q in gt.quotes),
        },
        "attraction_categories": attr,
        "contingency": {
            "labels": list(LABELS),
            "pooled": pooled,
            "by_list": {lid: by_list[lid][0] for lid in lists},
        },
        "attraction": {"pooled": pooled_edges, "by_list": {lid: by_list[lid][1] for lid in lists}},
        "revisions": revisions,
    }


def _edge_key(item: Any):
    return (item.get("source"), item.get("target")) if isinstance(item, dict) else item


def compare_metrics(actual: Any, expected: Any, *, rel: float = 1e-9, path: str = "$") -> list[str]:
    """Differences between two metric trees; floats compare within *rel*.

    Lists of attraction edges are compared as sets keyed by
    (source, target), since near-equal weights may sort either way.
    """
    if isinstance(expected, float) or isinstance(actual, float):
        if isinstance(actual, (int, float)) and isinstance(expected, (int, float)):
            if math.isclose(actual, expected, rel_tol=rel, abs_tol=1e-12):
                return []
        return [f"{path}: {actual!r} != {expected!r}"]
    if isinstance(expected, dict) and isinstance(actual, dict):
        out = []
        for k in sorted(set(actual) | set(expected), key=str):
            if k not in actual:
                out.append(f"{path}.{k}: missing")
            elif k not in expected:
                out.append(f"{path}.{k}: unexpected")
            else:
                out += compare_metrics(actual[k], expected[k], rel=rel, path=f"{path}.{k}")
        return out
    if isinstance(expected, list) and isinstance(actual, list):
        if len(actual) != len(expected):
            return [f"{path}: length {len(actual)} != {len(expected)}"]
        if expected and all(isinstance(e, dict) and "source" in e for e in expected + actual):
            actual = sorted(actual, key=_edge_key)
            expected = sorted(expected, key=_edge_key)
        out = []
        for i, (a, e) in enumerate(zip(actual, expected)):
            out += compare_metrics(a, e, rel=rel, path=f"{path}[{i}]")
        return out
    return [] if actual == expected else [f"{path}: {actual!r} != {expected!r}"]
