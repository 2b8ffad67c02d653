from __future__ import annotations

import json
from fractions import Fraction

from crossbound.ingest import ParticipantId, Role, Space, load_roster, parse_revision_log
from crossbound.reports import percent
from crossbound.revisions import (
    combined_contributions,
    contribution_profiles,
    credited_contributions,
    effective_revision_counts,
    revision_shares,
)

from conftest import disc_with

ROSTER = [
    {"canonical_name": "Raymond Admin", "role": "Administrator",
     "aliases": [{"name": "Raymond Admin", "email": "ra@x.org"}, {"name": "radmin", "email": ""}]},
    {"canonical_name": "Facundo Champion", "role": "User", "category": "U-C",
     "aliases": [{"name": "Facundo", "email": "fc@y.org"}, {"name": "fchamp", "email": ""}]},
    {"canonical_name": "David Editor", "role": "Developer",
     "aliases": [{"name": "deditor", "email": ""}]},
    {"canonical_name": "Tim Dev", "role": "Developer", "aliases": [{"name": "tdev", "email": ""}]},
]


def _entry(n, author, message, space):
    return json.dumps({"revision": f"{space[0]}{n}", "space": space, "path": "x",
                       "author": author, "date": "2004-06-01T00:00:00Z", "message": message})


def implementation_log() -> bytes:
    """44 module revisions: 34 by the administrator, 1 by the champion,
    3 crediting the champion, the rest by another developer."""
    lines = [_entry(i, "radmin", f"refactor step {i}", "Implementation") for i in range(34)]
    lines.append(_entry(34, "fchamp", "fix context copying", "Implementation"))
    lines += [_entry(35 + i, "tdev", f"apply Facundo's fix number {i}", "Implementation") for i in range(3)]
    lines += [_entry(38 + i, "tdev", f"tidy {i}", "Implementation") for i in range(6)]
    return ("\n".join(lines) + "\n").encode()


def documentation_log() -> bytes:
    """9 specification revisions: 5 by the champion, 4 by an editor who
    credits the champion every time."""
    lines = [_entry(i, "fchamp", f"spec draft {i}", "Documentation") for i in range(5)]
    lines += [_entry(5 + i, "deditor", f"update on behalf of Facundo Champion ({i})", "Documentation")
              for i in range(4)]
    return ("\n".join(lines) + "\n").encode()


def _records():
    roster = load_roster(ROSTER)
    return (parse_revision_log(implementation_log(), "Implementation", roster=roster)
            + parse_revision_log(documentation_log(), "Documentation", roster=roster))


def _who(name):
    return next(p for p in load_roster(ROSTER) if p.canonical_name == name)


def test_administrator_made_most_implementation_revisions():
    eff = effective_revision_counts(_records(), Space.IMPLEMENTATION)
    admin = _who("Raymond Admin")
    assert sum(eff.values()) == 44
    assert eff[admin] == 34
    assert percent(eff[admin], 44) == 77
    assert revision_shares(eff)[admin] == float(Fraction(34, 44))


def test_champion_combined_implementation_share():
    champ = _who("Facundo Champion")
    recs = _records()
    assert effective_revision_counts(recs, "Implementation")[champ] == 1
    assert credited_contributions(recs, "Implementation")[champ] == 3
    combined = combined_contributions(recs, "Implementation")[champ]
    assert combined == 4
    assert percent(combined, 44) == 9


def test_champion_documentation_revisions():
    champ = _who("Facundo Champion")
    recs = _records()
    eff = effective_revision_counts(recs, Space.DOCUMENTATION)
    assert sum(eff.values()) == 9
    assert eff[champ] == 5
    assert credited_contributions(recs, Space.DOCUMENTATION)[champ] == 4


def test_empty_and_uncredited():
    assert effective_revision_counts([]) == {}
    assert revision_shares({}) == {}
    roster = load_roster(ROSTER)
    (rec,) = parse_revision_log(_entry(1, "tdev", "typo", "Implementation").encode(), "Implementation",
                                roster=roster)
    assert credited_contributions([rec]) == {}


def test_profiles_join_messages_and_revisions():
    champ = _who("Facundo Champion")
    poster = ParticipantId("Only Talks", role=Role.USER)
    ds = [disc_with("d", ["Only Talks", "Only Talks"])]
    profiles = {p.participant.canonical_name: p for p in contribution_profiles([], ds, _records())}
    talk = profiles["Only Talks"]
    assert talk.participant == poster
    assert talk.discussion_messages == {"py-list": 2}
    assert (talk.doc_revisions_effective, talk.impl_revisions_effective) == (0, 0)
    silent = profiles["Raymond Admin"]
    assert silent.discussion_messages == {} and silent.impl_revisions_effective == 34
    c = profiles[champ.canonical_name]
    assert (c.doc_revisions_effective, c.doc_revisions_credited) == (5, 4)
    assert (c.impl_revisions_effective, c.impl_revisions_credited) == (1, 3)
