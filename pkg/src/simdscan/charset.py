"""Target character sets and their 16-entry nibble lookup tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HTML_MEMBERS = (0x3C, 0x0D, 0x26, 0x00)

_NAMES = {"NUL": 0x00, "CR": 0x0D, "AMP": 0x26, "LT": 0x3C}


class CharSetError(ValueError):
    pass


class DuplicateMember(CharSetError):
    pass


class NotNibbleDistinguishable(CharSetError):
    def __init__(self, a: int, b: int):
        super().__init__(
            f"bytes 0x{a:02X} and 0x{b:02X} share low nibble 0x{a & 0x0F:X}"
        )
        self.first = a
        self.second = b


class TooManyMembers(CharSetError):
    pass


def _filler(slot: int) -> int:
    # must never satisfy filler & 0x0F == slot
    value = ((slot + 1) % 16) << 4
    if value & 0x0F == slot:
        value = slot ^ 0xFF
    return value


@dataclass(frozen=True)
class CharSet:
    members: tuple[int, ...]
    nibble_table: bytes

    @property
    def table(self) -> np.ndarray:
        """The lookup table as a read-only uint8 array (what the kernels consume)."""
        arr = np.frombuffer(self.nibble_table, dtype=np.uint8)
        return arr

    def __contains__(self, v: int) -> bool:
        return is_member(self, v)

    def __len__(self) -> int:
        return len(self.members)

    def describe(self) -> str:
        inverse = {v: k for k, v in _NAMES.items()}
        return ",".join(inverse.get(m, f"\\x{m:02X}") for m in self.members)


def build_charset(members) -> CharSet:
    """Validate ``members`` and build the nibble table.

    Slot ``c & 0x0F`` of the table holds ``c`` for each member; every other
    slot holds a byte whose low nibble differs from the slot index, so it
    can never classify as a match.
    """
    values = [int(m) for m in members]
    if not values:
        raise CharSetError("character set must not be empty")
    for v in values:
        if not 0 <= v <= 0xFF:
            raise CharSetError(f"not a byte value: {v}")
    if len(set(values)) != len(values):
        seen: set[int] = set()
        dup = next(v for v in values if v in seen or seen.add(v))
        raise DuplicateMember(f"byte 0x{dup:02X} listed more than once")
    if len(values) > 16:
        raise TooManyMembers(f"{len(values)} members, at most 16 supported")

    table = [_filler(slot) for slot in range(16)]
    owner: dict[int, int] = {}
    for v in values:
        slot = v & 0x0F
        if slot in owner:
            raise NotNibbleDistinguishable(owner[slot], v)
        owner[slot] = v
        table[slot] = v
    return CharSet(tuple(values), bytes(table))


def is_member(charset: CharSet, v: int) -> bool:
    return charset.nibble_table[v & 0x0F] == v


def default_html_set() -> CharSet:
    return build_charset(HTML_MEMBERS)


def _parse_token(token: str) -> int:
    upper = token.upper()
    if upper in _NAMES:
        return _NAMES[upper]
    if len(token) == 4 and token[:2] in ("\\x", "\\X"):
        try:
            return int(token[2:], 16)
        except ValueError:
            pass
    if len(token) == 3 and token[0] == token[2] and token[0] in "'\"":
        token = token[1]
    if len(token) == 1 and token.isprintable() and ord(token) < 0x80:
        return ord(token)
    raise CharSetError(f"cannot parse character token {token!r}")


def parse_charset(spec: str) -> CharSet:
    """Parse a comma-separated spec such as ``LT,CR,AMP,NUL`` or ``'<',\\x0D``.

    A bare comma is written quoted: ``','``.
    """
    tokens = []
    buf = ""
    i = 0
    while i < len(spec):
        ch = spec[i]
        if ch in "'\"" and i + 2 < len(spec) and spec[i + 2] == ch and not buf:
            buf = spec[i : i + 3]
            i += 3
            continue
        if ch == ",":
            tokens.append(buf)
            buf = ""
        else:
            buf += ch
        i += 1
    tokens.append(buf)
    tokens = [t.strip() if t.strip() else t for t in tokens]
    if any(t == "" for t in tokens):
        raise CharSetError(f"empty token in character spec {spec!r}")
    return build_charset(_parse_token(t) for t in tokens)
