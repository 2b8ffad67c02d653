"""Render a metrics bundle as CSV tables, timeline JSON and DOT graphs."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .attraction import AttractionEdge, to_dot
from .pipeline import write_atomic

__all__ = ["FORMATS", "percent", "render_reports", "write_reports"]

FORMATS = ("csv", "json", "dot")

TABLE1_HEADER = ["corpus", "list", "discussions", "participants", "messages"]
TABLE2_HEADER = ["corpus", "list", "class", "count", "percent"]
TABLE3_HEADER = ["corpus", "list", "kind", "category", "mean_messages"]
CONTRIB_HEADER = [
    "corpus", "participant", "role", "msgs_user_list", "msgs_dev_list",
    "doc_eff", "doc_cred", "impl_eff", "impl_cred",
]
EDGES_HEADER = ["corpus", "quoter", "quoted", "quoter_message", "quoted_message", "list", "depth", "resolved"]
RD_HEADER = ["corpus", "scope", "quoter_category", "quoted_category", "count", "expected", "rd"]

_EXCLUSIVE_ORDER = ["ProjectLeader", "RegularOnly", "OccasionalOnly", "CommonOnly", "CrossParticipant"]
_ROLLUP_ORDER = ["Regular", "Occasional", "Common", "Cross"]


def percent(part: int, whole: int) -> int:
    """Integer percentage rounded half away from zero (18/66 -> 27)."""
    if whole <= 0 or part < 0:
        raise ValueError(f"cannot take {part} as a percentage of {whole}")
    return (200 * part + whole) // (2 * whole)


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    return buf.getvalue()


def _corpora(bundle: dict) -> list[tuple[str, dict]]:
    order = bundle.get("corpus_order") or sorted(bundle.get("corpora", {}))
    return [(name, bundle["corpora"][name]) for name in order if name in bundle.get("corpora", {})]


def _ordered_lists(bundle: dict, metrics: dict) -> list[str]:
    orient = bundle.get("lists", {})
    rank = {"user": 0, "developer": 1}
    return sorted(metrics["lists"], key=lambda lid: (rank.get(orient.get(lid), 2), lid))


def table1_rows(bundle: dict) -> list[list]:
    rows = []
    for name, section in _corpora(bundle):
        m = section["metrics"]
        for lid in _ordered_lists(bundle, m):
            ls = m["lists"][lid]
            rows.append([name, lid, ls["n_discussions"], ls["n_participants"], ls["n_messages"]])
    return rows


def table2_rows(bundle: dict) -> list[list]:
    rows = []
    for name, section in _corpora(bundle):
        m = section["metrics"]
        for lid in _ordered_lists(bundle, m):
            ls = m["lists"][lid]
            total = ls["n_participants"]
            if not total:
                continue
            for cls in ("regular", "occasional"):
                n = len(ls[cls])
                rows.append([name, lid, cls, n, f"{percent(n, total)}%"])
            rows.append([name, lid, "total", total, "100%"])
    return rows


def table3_rows(bundle: dict) -> list[list]:
    rows = []
    for name, section in _corpora(bundle):
        m = section["metrics"]
        for lid in _ordered_lists(bundle, m):
            for kind, table, order in (
                ("exclusive", m["involvement"], _EXCLUSIVE_ORDER),
                ("rollup", m["involvement_rollups"], _ROLLUP_ORDER),
            ):
                for cat in order:
                    if lid in table.get(cat, {}):
                        rows.append([name, lid, kind, cat, repr(table[cat][lid])])
    return rows


def contribution_rows(bundle: dict) -> list[list]:
    user = next((k for k, v in bundle.get("lists", {}).items() if v == "user"), None)
    dev = next((k for k, v in bundle.get("lists", {}).items() if v == "developer"), None)
    rows = []
    for name, section in _corpora(bundle):
        for c in section["contributions"]:
            rows.append([
                name, c["participant"], c["role"],
                c["messages"].get(user, 0), c["messages"].get(dev, 0),
                c["doc_eff"], c["doc_cred"], c["impl_eff"], c["impl_cred"],
            ])
    return rows


def edge_rows(bundle: dict) -> list[list]:
    rows = []
    for name, section in _corpora(bundle):
        for e in section["quote_edges"]:
            rows.append([
                name, e["quoter"], e["quoted"], e["quoter_message"], e["quoted_message"],
                e["list"], e["depth"], "true" if e["resolved"] else "false",
            ])
    return rows


def rd_rows(bundle: dict) -> list[list]:
    rows = []
    for name, section in _corpora(bundle):
        cont = section["metrics"]["contingency"]
        labels = cont["labels"]
        scopes = [("pooled", cont["pooled"])] + sorted(cont["by_list"].items())
        for scope, tab in scopes:
            if tab["rd"] is None:
                continue
            for i, src in enumerate(labels):
                for j, dst in enumerate(labels):
                    exp = tab["expected"][i][j]
                    rd = tab["rd"][i][j]
                    rows.append([
                        name, scope, src, dst, tab["counts"][i][j],
                        repr(exp), "" if rd is None else repr(rd),
                    ])
    return rows


def attraction_dot(bundle: dict) -> str:
    parts = []
    for name, section in _corpora(bundle):
        m = section["metrics"]
        by_list = {
            lid: [AttractionEdge(e["source"], e["target"], e["weight"], e["count"], lid) for e in edges]
            for lid, edges in m["attraction"]["by_list"].items()
        }
        parts.append(to_dot(by_list, m["contingency"]["labels"], name=name))
    return "".join(parts)


def timeline_json(bundle: dict) -> str:
    doc = {
        name: {"timeline": section["timeline"], "design_steps": section["design_steps"]}
        for name, section in _corpora(bundle)
    }
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def render_reports(bundle: dict, formats: Iterable[str] = FORMATS) -> dict[str, str]:
    """File name -> rendered content for the requested *formats*."""
    formats = set(formats)
    unknown = formats - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown report format(s): {', '.join(sorted(unknown))}")
    out: dict[str, str] = {}
    if "csv" in formats:
        out["table1.csv"] = _csv(TABLE1_HEADER, table1_rows(bundle))
        out["table2.csv"] = _csv(TABLE2_HEADER, table2_rows(bundle))
        out["table3.csv"] = _csv(TABLE3_HEADER, table3_rows(bundle))
        out["contributions.csv"] = _csv(CONTRIB_HEADER, contribution_rows(bundle))
        out["quote_edges.csv"] = _csv(EDGES_HEADER, edge_rows(bundle))
        out["rd.csv"] = _csv(RD_HEADER, rd_rows(bundle))
    if "json" in formats:
        out["timeline.json"] = timeline_json(bundle)
    if "dot" in formats:
        out["attraction.dot"] = attraction_dot(bundle)
    return out


def write_reports(bundle: dict, out_dir: Path, formats: Iterable[str] = FORMATS) -> list[Path]:
    written = []
    for fname, text in sorted(render_reports(bundle, formats).items()):
        path = out_dir / fname
        write_atomic(path, text)
        written.append(path)
    return written
