import pytest
from hypothesis import given
from hypothesis import strategies as st

from simdscan.charset import (
    CharSetError,
    DuplicateMember,
    NotNibbleDistinguishable,
    TooManyMembers,
    build_charset,
    default_html_set,
    is_member,
    parse_charset,
)


def assert_table_invariants(cs):
    assert len(cs.nibble_table) == 16
    for c in cs.members:
        assert cs.nibble_table[c & 0x0F] == c
    for v in range(256):
        assert (cs.nibble_table[v & 0x0F] == v) == (v in cs.members)
    used = {c & 0x0F for c in cs.members}
    for slot in set(range(16)) - used:
        assert cs.nibble_table[slot] & 0x0F != slot


def test_html_members_land_in_their_slots():
    cs = build_charset([0x00, 0x26, 0x3C, 0x0D])
    assert cs.nibble_table[0x0] == 0x00
    assert cs.nibble_table[0x6] == 0x26
    assert cs.nibble_table[0xC] == 0x3C
    assert cs.nibble_table[0xD] == 0x0D
    assert_table_invariants(cs)


def test_single_member():
    cs = build_charset([0x41])
    assert cs.nibble_table[0x1] == 0x41
    assert_table_invariants(cs)
    assert [v for v in range(256) if is_member(cs, v)] == [0x41]


def test_set_without_nul_does_not_match_nul():
    # a zero-filled table would report 0x00 as a member here
    cs = build_charset([0x3C])
    assert not is_member(cs, 0x00)
    assert_table_invariants(cs)


def test_nibble_collision_names_both_bytes():
    with pytest.raises(NotNibbleDistinguishable) as info:
        build_charset([0x26, 0x36])
    assert "0x26" in str(info.value) and "0x36" in str(info.value)


def test_rejections():
    with pytest.raises(DuplicateMember):
        build_charset([0x3C, 0x3C])
    with pytest.raises(TooManyMembers):
        build_charset(range(17))
    with pytest.raises(CharSetError):
        build_charset([])
    with pytest.raises(CharSetError):
        build_charset([256])


def test_is_member_examples(html_set):
    assert is_member(html_set, 0x3C)
    assert not is_member(html_set, 0x20)
    # 0x1C shares '<'s low nibble; table[0xC] is 0x3C, not 0x1C
    assert html_set.nibble_table[0x1C & 0x0F] == 0x3C
    assert not is_member(html_set, 0x1C)


def test_default_html_set():
    cs = default_html_set()
    assert set(cs.members) == {0x00, 0x0D, 0x26, 0x3C}
    assert not is_member(cs, 0x0A)
    assert sum(is_member(cs, v) for v in range(256)) == 4


@st.composite
def nibble_sets(draw):
    slots = draw(st.lists(st.integers(0, 15), min_size=1, max_size=16, unique=True))
    return [s | (draw(st.integers(0, 15)) << 4) for s in slots]


@given(nibble_sets())
def test_valid_sets_build_and_round_trip(members):
    cs = build_charset(members)
    assert list(cs.members) == members
    assert_table_invariants(cs)


@given(st.lists(st.integers(0, 255), min_size=2, max_size=16, unique=True))
def test_colliding_sets_are_rejected(members):
    nibbles = [m & 0x0F for m in members]
    if len(set(nibbles)) == len(nibbles):
        assert_table_invariants(build_charset(members))
    else:
        with pytest.raises(NotNibbleDistinguishable):
            build_charset(members)


@pytest.mark.parametrize(
    "spec, expected",
    [
        ("LT,CR,AMP,NUL", (0x3C, 0x0D, 0x26, 0x00)),
        ("lt, cr", (0x3C, 0x0D)),
        ("'<',\\x0D,AMP", (0x3C, 0x0D, 0x26)),
        ("',',\\x00", (0x2C, 0x00)),
        ("a", (0x61,)),
    ],
)
def test_parse_charset(spec, expected):
    assert parse_charset(spec).members == expected


@pytest.mark.parametrize("spec", ["", "LT,,CR", "FOO", "\\xZZ", "LT,\\x3C"])
def test_parse_charset_rejects(spec):
    with pytest.raises(CharSetError):
        parse_charset(spec)
