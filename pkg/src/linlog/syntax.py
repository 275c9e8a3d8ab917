"""Formulas, sequents, the ASCII grammar, and the canonical printer.

Grammar (tightest binding first)::

    unary   ~A  !A  ?A
    *       tensor          left assoc
    |       par             left assoc
    &       with            left assoc
    +       plus            left assoc
    -o      linear implication, right assoc

Units are written ``1 bot top 0``; atoms are identifiers such as ``p``,
``c_s1`` or ``a'``.  A sequent is ``A1, ..., An |- B1, ..., Bm``.
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from operator import attrgetter

from .errors import ForbiddenSymbol, IntuitionisticArity, ParseError

__all__ = [
    "Formula", "Atom", "One", "Bot", "Top", "Zero", "Neg", "Bang", "Quest",
    "Tensor", "Par", "With", "Plus", "Lolli", "ONE", "BOT", "TOP", "ZERO",
    "LanguageId", "Sequent", "parse_formula", "print_formula", "parse_sequent",
    "print_sequent", "size", "atoms", "admits", "check_language", "subformulas",
]


class Formula:
    """Immutable formula node.

    Every node carries a structural ``key`` (a nested tuple) which gives both
    equality and the total order used to keep multisets canonical, and
    ``kinds``, a bitmask of the ranks of all constructors occurring in it.
    """

    __slots__ = ("key", "_hash", "size", "kinds")
    rank = -1
    symbol = ""

    def __eq__(self, other):
        return self is other or (isinstance(other, Formula) and self.key == other.key)

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"<{print_formula(self)}>"

    def __str__(self):
        return print_formula(self)


class Atom(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)
    rank = 0

    def __init__(self, name):
        self.name = name
        self.key = (0, name)
        self._hash = hash(self.key)
        self.size = 1
        self.kinds = 1


class _Unit(Formula):
    __slots__ = ()
    __match_args__ = ()

    def __init__(self):
        self.key = (self.rank,)
        self._hash = hash(self.key)
        self.size = 1
        self.kinds = 1 << self.rank


class One(_Unit):
    __slots__ = ()
    rank = 1
    symbol = "1"


class Bot(_Unit):
    __slots__ = ()
    rank = 2
    symbol = "bot"


class Top(_Unit):
    __slots__ = ()
    rank = 3
    symbol = "top"


class Zero(_Unit):
    __slots__ = ()
    rank = 4
    symbol = "0"


ONE, BOT, TOP, ZERO = One(), Bot(), Top(), Zero()


class _Unary(Formula):
    __slots__ = ("sub",)
    __match_args__ = ("sub",)

    def __init__(self, sub):
        self.sub = sub
        self.key = (self.rank, sub.key)
        self._hash = hash((self.rank, sub._hash))
        self.size = sub.size + 1
        self.kinds = sub.kinds | (1 << self.rank)


class Neg(_Unary):
    __slots__ = ()
    rank = 5
    symbol = "~"


class Bang(_Unary):
    __slots__ = ()
    rank = 6
    symbol = "!"


class Quest(_Unary):
    __slots__ = ()
    rank = 7
    symbol = "?"


class _Binary(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.key = (self.rank, left.key, right.key)
        self._hash = hash((self.rank, left._hash, right._hash))
        self.size = left.size + right.size + 1
        self.kinds = left.kinds | right.kinds | (1 << self.rank)


class Tensor(_Binary):
    __slots__ = ()
    rank = 8
    symbol = "*"


class Par(_Binary):
    __slots__ = ()
    rank = 9
    symbol = "|"


class With(_Binary):
    __slots__ = ()
    rank = 10
    symbol = "&"


class Plus(_Binary):
    __slots__ = ()
    rank = 11
    symbol = "+"


class Lolli(_Binary):
    __slots__ = ()
    rank = 12
    symbol = "-o"


def size(f: Formula) -> int:
    return f.size


def subformulas(f: Formula):
    """Yield every node of ``f`` (pre-order)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, _Binary):
            stack.append(g.right)
            stack.append(g.left)
        elif isinstance(g, _Unary):
            stack.append(g.sub)


def atoms(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if isinstance(g, Atom)}


# ---------------------------------------------------------------------------
# Languages


class LanguageId(enum.Enum):
    L = "L"
    Lminus = "Lminus"
    LI = "LI"
    LIminus = "LIminus"

    @property
    def forbidden(self):
        return _FORBIDDEN[self]

    @property
    def forbidden_mask(self):
        return _FORBIDDEN_MASK[self]

    @property
    def intuitionistic(self):
        return self in (LanguageId.LI, LanguageId.LIminus)


_FORBIDDEN = {
    LanguageId.L: frozenset(),
    LanguageId.Lminus: frozenset({One, Bot}),
    LanguageId.LI: frozenset({Bot, Par, Neg, Quest}),
    LanguageId.LIminus: frozenset({Bot, Par, Neg, Quest, One}),
}


_FORBIDDEN_MASK = {
    lang: sum(1 << cls.rank for cls in bad) for lang, bad in _FORBIDDEN.items()
}


def admits(lang: LanguageId, f: Formula) -> bool:
    return not (f.kinds & _FORBIDDEN_MASK[lang])


def check_language(f: Formula, lang: LanguageId) -> None:
    bad = lang.forbidden
    for g in subformulas(f):
        if type(g) in bad:
            raise ForbiddenSymbol(g.symbol, lang)


# ---------------------------------------------------------------------------
# Sequents

_KEY = attrgetter("key")


def canonical(formulas) -> tuple:
    """Sort a collection of formulas into canonical multiset order."""
    return tuple(sorted(formulas, key=_KEY))


@dataclass(frozen=True)
class Sequent:
    """``ante |- succ`` over finite multisets.

    Both sides are stored as tuples sorted by the structural order, so tuple
    equality is multiset equality and exchange never has to be spelled out.
    """

    ante: tuple
    succ: tuple

    def __post_init__(self):
        object.__setattr__(self, "ante", canonical(self.ante))
        object.__setattr__(self, "succ", canonical(self.succ))

    def formulas(self):
        yield from self.ante
        yield from self.succ

    @property
    def size(self):
        return sum(f.size for f in self.formulas())

    def __str__(self):
        return print_sequent(self)


def msub(big: tuple, small) -> tuple | None:
    """Multiset difference ``big - small``; None if ``small`` is not contained."""
    need = Counter(small)
    out = []
    for f in big:
        if need.get(f, 0):
            need[f] -= 1
        else:
            out.append(f)
    if any(need.values()):
        return None
    return tuple(out)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<turnstile>\|-)
  | (?P<lolli>-o)
  | (?P<op>[*|&+~!?(),])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'@.]*)
  | (?P<num>[0-9]+)
    """,
    re.VERBOSE,
)

_UNITS = {"1": ONE, "bot": BOT, "top": TOP, "0": ZERO}
_UNARY = {"~": Neg, "!": Bang, "?": Quest}
# loosest first; -o is handled separately (right associative)
_BINARY_LEVELS = [("+", Plus), ("&", With), ("|", Par), ("*", Tensor)]


def _strip_comments(text):
    return "\n".join(line.split("#", 1)[0] for line in text.split("\n"))


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if kind == "lolli":
                kind = "op"
            if kind == "num" and value not in ("0", "1"):
                raise ParseError(f"unexpected number {value!r}", pos)
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, lang):
        self.lang = lang
        self.tokens = _tokenize(_strip_comments(text))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, got, pos = self.take()
        if got != value:
            raise ParseError(f"expected {value!r}, found {got or 'end of input'!r}", pos)

    def admit(self, cls, symbol, pos):
        if cls in self.lang.forbidden:
            raise ForbiddenSymbol(symbol, self.lang, pos)

    def formula(self):
        left = self.binary(0)
        kind, value, pos = self.peek()
        if value == "-o":
            self.take()
            self.admit(Lolli, "-o", pos)
            return Lolli(left, self.formula())
        return left

    def binary(self, level):
        if level == len(_BINARY_LEVELS):
            return self.unary()
        symbol, cls = _BINARY_LEVELS[level]
        left = self.binary(level + 1)
        while self.peek()[1] == symbol and self.peek()[0] == "op":
            pos = self.take()[2]
            self.admit(cls, symbol, pos)
            left = cls(left, self.binary(level + 1))
        return left

    def unary(self):
        kind, value, pos = self.take()
        if kind == "op" and value in _UNARY:
            cls = _UNARY[value]
            self.admit(cls, value, pos)
            return cls(self.unary())
        if kind == "op" and value == "(":
            f = self.formula()
            self.expect(")")
            return f
        if kind == "num" or (kind == "ident" and value in _UNITS):
            unit = _UNITS[value]
            self.admit(type(unit), value, pos)
            return unit
        if kind == "ident":
            return Atom(value)
        raise ParseError(f"expected a formula, found {value or 'end of input'!r}", pos)

    def formula_list(self, stop):
        out = []
        if self.peek()[0] in stop:
            return out
        while True:
            out.append(self.formula())
            if self.peek()[1] == ",":
                self.take()
                continue
            return out

    def end(self):
        kind, value, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {value!r}", pos)


def parse_formula(text: str, lang: LanguageId = LanguageId.L) -> Formula:
    p = _Parser(text, lang)
    f = p.formula()
    p.end()
    return f


def parse_sequent(text: str, lang: LanguageId = LanguageId.L, intuitionistic: bool | None = None) -> Sequent:
    if intuitionistic is None:
        intuitionistic = lang.intuitionistic
    p = _Parser(text, lang)
    ante = p.formula_list(stop=("turnstile",))
    kind, value, pos = p.take()
    if kind != "turnstile":
        raise ParseError(f"expected '|-', found {value or 'end of input'!r}", pos)
    succ = p.formula_list(stop=("eof",))
    p.end()
    if intuitionistic and len(succ) != 1:
        raise IntuitionisticArity(len(succ))
    return Sequent(tuple(ante), tuple(succ))


# ---------------------------------------------------------------------------
# Printing

_PREC = {Lolli: 1, Plus: 2, With: 3, Par: 4, Tensor: 5}
_UNARY_PREC = 6
_ATOM_PREC = 7


def _prec(f):
    if isinstance(f, _Binary):
        return _PREC[type(f)]
    if isinstance(f, _Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def print_formula(f: Formula) -> str:
    """Print with the fewest parentheses the parser needs to rebuild ``f``."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, _Unit):
        return f.symbol
    if isinstance(f, _Unary):
        inner = print_formula(f.sub)
        if _prec(f.sub) < _UNARY_PREC:
            inner = f"({inner})"
        return f.symbol + inner
    p = _PREC[type(f)]
    right_assoc = isinstance(f, Lolli)
    left, right = print_formula(f.left), print_formula(f.right)
    lp, rp = _prec(f.left), _prec(f.right)
    if lp < p or (lp == p and right_assoc):
        left = f"({left})"
    if rp < p or (rp == p and not right_assoc):
        right = f"({right})"
    return f"{left} {f.symbol} {right}"


def print_sequent(s: Sequent) -> str:
    ante = ", ".join(print_formula(f) for f in s.ante)
    succ = ", ".join(print_formula(f) for f in s.succ)
    return " ".join(part for part in (ante, "|-", succ) if part)
