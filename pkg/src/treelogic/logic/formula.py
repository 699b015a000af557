"""Two-sorted temporal formulas over (tree, world) states.

Prefix formulas (sort ``L``) talk about a run so far or a run that never
ends. Suffix formulas (sort ``R``) additionally pin down how a
terminating run ends, through ``Done`` postconditions. Binary temporal
operators always take a prefix formula on the left; the right operand
decides the sort of the whole formula. ``AG``/``EG`` exist only in the
prefix sort.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..kripke import Obs, Pure
from ..instrument import Log

PREFIX = "L"
SUFFIX = "R"


class SortError(TypeError):
    """A formula mixes prefix and suffix operands illegally."""


class Pred:
    """An executable predicate with an optional concrete-syntax rendering.

    Predicates with text compare by text, which is what makes parsed
    formulas comparable; bare predicates compare by identity.
    """

    __slots__ = ("fn", "text", "label")

    def __init__(self, fn, text=None, label=None):
        self.fn = fn
        self.text = text
        # display-only name for predicates without concrete syntax
        self.label = label

    def __call__(self, *args):
        return self.fn(*args)

    def __eq__(self, other):
        if not isinstance(other, Pred):
            return NotImplemented
        if self.text is None or other.text is None:
            return self is other
        return self.text == other.text

    def __hash__(self):
        return hash(self.text) if self.text is not None else id(self)

    def __repr__(self):
        if self.text is not None:
            return self.text
        return self.label or f"<{getattr(self.fn, '__name__', 'pred')}>"


def as_pred(p):
    return p if isinstance(p, Pred) else Pred(p)


class Formula:
    __slots__ = ()
    sort = PREFIX

    def __str__(self):
        return to_text(self)


def _check_left(op, left):
    if left.sort not in (PREFIX, "*"):
        raise SortError(f"{op}: left operand must be a prefix formula")


@dataclass(frozen=True, repr=False)
class Now(Formula):
    pred: Pred

    @property
    def sort(self):
        return PREFIX


@dataclass(frozen=True, repr=False)
class Done(Formula):
    pred: Pred

    @property
    def sort(self):
        return SUFFIX


@dataclass(frozen=True, repr=False)
class _Next(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        _check_left(type(self).__name__, self.left)

    @property
    def sort(self):
        return self.right.sort


class AN(_Next):
    """Left holds now, some step exists, and every next state satisfies right."""


class EN(_Next):
    """Left holds now and some next state satisfies right."""


class AU(_Next):
    """On every path, left holds until right does."""


class EU(_Next):
    """On some path, left holds until right does."""


@dataclass(frozen=True, repr=False)
class _Global(Formula):
    body: Formula

    def __post_init__(self):
        if self.body.sort == SUFFIX:
            raise SortError(f"{type(self).__name__} takes a prefix formula")

    @property
    def sort(self):
        return PREFIX


class AG(_Global):
    pass


class EG(_Global):
    pass


@dataclass(frozen=True, repr=False)
class _Bool(Formula):
    left: Formula
    right: Formula

    def __post_init__(self):
        a, b = self.left.sort, self.right.sort
        if "*" not in (a, b) and a != b:
            raise SortError(f"{type(self).__name__}: operands have different sorts")

    @property
    def sort(self):
        return self.right.sort if self.left.sort == "*" else self.left.sort


class And(_Bool):
    pass


class Or(_Bool):
    pass


@dataclass(frozen=True, repr=False)
class Meta(Formula):
    """Pattern variable used by the rewrite laws. ``kind`` is L or * (either sort)."""

    name: str
    kind: str = PREFIX

    @property
    def sort(self):
        return self.kind


for _cls in (Now, Done, AN, EN, AU, EU, AG, EG, And, Or, Meta):
    _cls.__repr__ = lambda self: to_text(self)


# ------------------------------------------------------------- sugar

TOP = Pred(lambda w: True, "top")
BOT = Pred(lambda w: False, "bot")
TOP_DONE = Pred(lambda x, w: True, "Top")
BOT_DONE = Pred(lambda x, w: False, "Bot")

top = Now(TOP)
bot = Now(BOT)
Top = Done(TOP_DONE)
Bot = Done(BOT_DONE)


def now(p, text=None):
    return Now(Pred(p, text) if text is not None else as_pred(p))


def done(p, text=None):
    return Done(Pred(p, text) if text is not None else as_pred(p))


def AX(p):
    return AN(top, p)


def EX(p):
    return EN(top, p)


def AF(p):
    return AU(top, p)


def EF(p):
    return EU(top, p)


pure = Now(Pred(lambda w: w is Pure, "pure"))


def obs(p, text=None):
    """Current world is an observation ``Obs e v`` with ``p(e, v)``."""
    return now(lambda w: isinstance(w, Obs) and bool(p(w.event, w.response)), text)


def logged(p, text=None):
    """Current world is a log observation whose payload satisfies ``p``."""
    return now(lambda w: isinstance(w, Obs) and isinstance(w.event, Log)
               and bool(p(w.event.observation)), text)


def done_eq(x, w):
    """Finished with value ``x``, resuming in world ``w``."""
    return done(lambda y, w2: y == x and w2 == w, f"done_eq({x!r}, {w!r})")


def val(p, text=None):
    """Finished from Pure with a value satisfying ``p``."""
    return done(lambda x, w: w is Pure and bool(p(x)), text)


def finish(p, text=None):
    """Finished after an observation: ``p(e, v, x)``."""
    return done(lambda x, w: isinstance(w, Obs) and bool(p(w.event, w.response, x)), text)


# ---------------------------------------------------------- printing

_LEVEL_OR, _LEVEL_AND, _LEVEL_UNTIL, _LEVEL_UNARY = 1, 2, 3, 4


def to_text(f):
    """Render in the concrete syntax accepted by the formula parser."""
    return _show(f, 0)


def _wrap(s, level, need):
    return f"({s})" if level > need else s


def _show(f, level):
    if isinstance(f, (Now, Done)):
        return repr(f.pred)
    if isinstance(f, Meta):
        return f.name
    if isinstance(f, Or):
        return _wrap(f"{_show(f.left, _LEVEL_OR)} \\/ {_show(f.right, _LEVEL_AND)}", level, _LEVEL_OR)
    if isinstance(f, And):
        return _wrap(f"{_show(f.left, _LEVEL_AND)} /\\ {_show(f.right, _LEVEL_UNTIL)}", level, _LEVEL_AND)
    if isinstance(f, (AU, EU)):
        if f.left == top:
            name = "AF" if isinstance(f, AU) else "EF"
            return _wrap(f"{name} {_show(f.right, _LEVEL_UNARY)}", level, _LEVEL_UNARY)
        op = "AU" if isinstance(f, AU) else "EU"
        return _wrap(f"{_show(f.left, _LEVEL_UNARY)} {op} {_show(f.right, _LEVEL_UNTIL)}", level, _LEVEL_UNTIL)
    if isinstance(f, (AN, EN)):
        if f.left == top:
            name = "AX" if isinstance(f, AN) else "EX"
            return _wrap(f"{name} {_show(f.right, _LEVEL_UNARY)}", level, _LEVEL_UNARY)
        op = "AN" if isinstance(f, AN) else "EN"
        return _wrap(f"{op} {_show(f.left, _LEVEL_UNARY + 1)} {_show(f.right, _LEVEL_UNARY + 1)}",
                     level, _LEVEL_UNARY)
    if isinstance(f, (AG, EG)):
        return _wrap(f"{type(f).__name__} {_show(f.body, _LEVEL_UNARY)}", level, _LEVEL_UNARY)
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f):
    """Post-order list of distinct subformulas."""
    out, seen = [], set()

    def go(g):
        if g in seen:
            return
        for child in children(g):
            go(child)
        seen.add(g)
        out.append(g)

    go(f)
    return out


def children(f):
    if isinstance(f, (_Next, _Bool)):
        return (f.left, f.right)
    if isinstance(f, _Global):
        return (f.body,)
    return ()
