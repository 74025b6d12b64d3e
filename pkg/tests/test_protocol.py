import pytest

from grd.errors import ProtocolError
from grd.protocol import (
    Label,
    ProtocolEntry,
    paired_entries,
    parse_protocol,
    parse_protocol_text,
    render_protocol,
    write_protocol,
)


def test_basic_entry():
    entries = parse_protocol_text("u1 genuine p1\n")
    assert entries == [ProtocolEntry("u1", Label.GENUINE, "p1")]


def test_missing_pair_id_is_none():
    entries = parse_protocol_text("u1 spoof\n")
    assert entries[0].pair_id is None


def test_unknown_label_reports_line():
    with pytest.raises(ProtocolError, match="line 1"):
        parse_protocol_text("u2 bonafide\n")
    with pytest.raises(ProtocolError, match="line 3"):
        parse_protocol_text("u1 genuine\nu2 spoof\nu3 fake\n")


def test_duplicate_id_named():
    text = "u1 genuine\nu2 spoof\nu1 spoof\n"
    with pytest.raises(ProtocolError, match="u1"):
        parse_protocol_text(text)


def test_comments_and_blank_lines():
    text = "# header\n\nu1 genuine p1\n   \n# tail\nu2 spoof p1\n"
    entries = parse_protocol_text(text)
    assert [e.utterance_id for e in entries] == ["u1", "u2"]


def test_wrong_token_count():
    with pytest.raises(ProtocolError, match="line 1"):
        parse_protocol_text("u1 genuine p1 extra\n")


def test_render_parse_round_trip():
    entries = [
        ProtocolEntry("a", Label.GENUINE, "p0"),
        ProtocolEntry("b", Label.SPOOF, "p0"),
        ProtocolEntry("c", Label.GENUINE),
        ProtocolEntry("d", Label.SPOOF, "p9"),
    ]
    assert parse_protocol_text(render_protocol(entries)) == entries


def test_file_round_trip(tmp_path):
    entries = [ProtocolEntry("x", Label.GENUINE, "p1"), ProtocolEntry("y", Label.SPOOF, "p1")]
    path = tmp_path / "p.txt"
    write_protocol(entries, path)
    assert parse_protocol(path) == entries


def test_paired_entries_matches_by_pair_id():
    entries = parse_protocol_text("g1 genuine p1\ns1 spoof p1\ng2 genuine p2\ns2 spoof p2\n")
    pairs = paired_entries(entries)
    assert [(g.utterance_id, s.utterance_id) for g, s in pairs] == [("g1", "s1"), ("g2", "s2")]


def test_paired_entries_warns_and_skips():
    entries = parse_protocol_text("g1 genuine p1\ns1 spoof p1\nloner genuine\ng3 genuine p3\n")
    with pytest.warns(UserWarning):
        pairs = paired_entries(entries)
    assert len(pairs) == 1
