"""Text form of eventually periodic sets.

Grammar (whitespace-insensitive)::

    set     := [ ints "+" ] "mod" INT ints [ "from" INT ]
               [ "except-add" ints ] [ "except-remove" ints ]
    ints    := "{" [ INT ( "," INT )* ] "}"

Meaning: start from the full residue pattern ``{n >= 0 : n % q in R}``,
add the leading braces and ``except-add`` elements, then drop the
``except-remove`` elements. ``from T`` is the threshold below which the
exceptions live; when given, every added or removed element must be ``< T``.

The canonical rendering lists added elements in front, removed ones at the
end and prints ``from T`` with the canonical threshold, e.g.
``{0} + mod 4 {1} from 4`` for ``{0} ∪ (4N + 1)``.
"""

from __future__ import annotations

import re

from . import _bits
from ._bits import repeat
from .errors import SetSyntaxError
from .periodic_sets import EventuallyPeriodicSet, from_masks

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<word>except-add|except-remove|mod|from)|(?P<sym>[{},+]))")


def _fmt(values) -> str:
    return "{" + ",".join(str(v) for v in sorted(values)) + "}"


def render(S: EventuallyPeriodicSet) -> str:
    T, q = S.threshold, S.modulus
    pattern = repeat(S.residue_mask, q, T // q)
    added = _bits.to_indices(S.exception_mask & ~pattern).tolist()
    removed = _bits.to_indices(pattern & ~S.exception_mask).tolist()
    text = f"mod {q} {_fmt(S.residues)}"
    if added:
        text = f"{_fmt(added)} + {text}"
    if T:
        text += f" from {T}"
    if removed:
        text += f" except-remove {_fmt(removed)}"
    return text


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise SetSyntaxError("unexpected character", text, len(text) - len(text[pos:].lstrip()))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind, value=None):
        tok = self.peek()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise SetSyntaxError(f"expected {want!r}, found {tok[1] or 'end of input'!r}",
                                 self.text, tok[2])
        self.i += 1
        return tok

    def integer(self) -> int:
        return int(self.take("int")[1])

    def int_set(self) -> list[tuple[int, int]]:
        self.take("sym", "{")
        values = []
        if self.peek()[1] != "}":
            while True:
                tok = self.take("int")
                values.append((int(tok[1]), tok[2]))
                if self.peek()[1] == ",":
                    self.take("sym", ",")
                    continue
                break
        self.take("sym", "}")
        return values

    def parse(self) -> EventuallyPeriodicSet:
        adds: list[tuple[int, int]] = []
        removes: list[tuple[int, int]] = []
        if self.peek()[1] == "{":
            adds += self.int_set()
            self.take("sym", "+")
        self.take("word", "mod")
        q_tok = self.peek()
        q = self.integer()
        if q < 1:
            raise SetSyntaxError("modulus must be positive", self.text, q_tok[2])
        residues = self.int_set()
        for r, pos in residues:
            if r >= q:
                raise SetSyntaxError(f"residue {r} not below modulus {q}", self.text, pos)
        T = None
        if self.peek()[1] == "from":
            self.take("word", "from")
            T = self.integer()
        if self.peek()[1] == "except-add":
            self.take("word", "except-add")
            adds += self.int_set()
        if self.peek()[1] == "except-remove":
            self.take("word", "except-remove")
            removes += self.int_set()
        self.take("end")
        limit = max([v + 1 for v, _ in adds + removes] + [T or 0])
        if T is not None:
            for v, pos in adds + removes:
                if v >= T:
                    raise SetSyntaxError(f"exception {v} not below threshold {T}", self.text, pos)
        limit = -(-limit // q) * q
        rmask = _bits.from_indices(r for r, _ in residues)
        emask = repeat(rmask, q, limit // q)
        emask |= _bits.from_indices(v for v, _ in adds)
        emask &= ~_bits.from_indices(v for v, _ in removes)
        return from_masks(q, rmask, limit, emask)


def parse_set(text: str) -> EventuallyPeriodicSet:
    """Parse the set grammar; errors carry the offending position."""
    return _Parser(text).parse()
