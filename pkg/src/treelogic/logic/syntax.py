"""Concrete syntax for formulas and the predicate mini-language inside atoms.

Grammar (loosest binding first)::

    phi   := phi "\\/" phi | phi "/\\" phi | unary ("AU" | "EU") phi | unary
    unary := ("AX"|"EX"|"AF"|"EF"|"AG"|"EG") unary | ("AN"|"EN") unary unary
           | atom | "(" phi ")"
    atom  := top | bot | Top | Bot | pure | obs(pred) | [pred]
           | done(pred) | val(pred) | finish(pred)
    pred  := pred "||" pred | pred "&&" pred | "!" pred | "(" pred ")"
           | term cmp term | true | false
    term  := atom_term (("+"|"-") atom_term)*      atom_term := int | field

``\\/`` and ``/\\`` associate to the left, AU/EU to the right.
Fields are looked up in the observation (or the final value for done/val/
finish atoms) through a Vocabulary. A field that is absent makes the
whole atom false.
"""

from __future__ import annotations

import operator
import re
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Callable

from ..instrument import Log
from ..kripke import Obs, Pure
from .formula import (AG, AN, AU, BOT, BOT_DONE, EG, EN, EU, TOP, TOP_DONE, And, Done, Now, Or,
                      Pred, SortError, SUFFIX, PREFIX, pure, to_text)


class FormulaSyntaxError(ValueError):
    def __init__(self, message, pos=None):
        super().__init__(message if pos is None else f"{message} at offset {pos}")
        self.pos = pos


class MissingField(LookupError):
    pass


def _default_fields(value):
    if isinstance(value, Mapping):
        return dict(value)
    return {"value": value}


@dataclass
class Vocabulary:
    """How atoms see observations and final values as named integer fields."""

    observe: Callable = _default_fields
    constants: dict = field(default_factory=dict)
    value_fields: Callable = _default_fields


DEFAULT_VOCAB = Vocabulary()

# ---------------------------------------------------------------- lexer

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(/\\|\\/|&&|\|\||<=|>=|==|!=|[()\[\]<>!+\-,]))")


def tokenize(text):
    toks, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos:pos + 1]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("id", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("eof", "end of input", len(text)))
    return toks


# ------------------------------------------------------ predicate AST

_CMP = {"<": operator.lt, "<=": operator.le, "==": operator.eq, ">=": operator.ge,
        ">": operator.gt, "!=": operator.ne}


def eval_expr(e, env):
    tag = e[0]
    if tag == "int":
        return e[1]
    if tag == "bool":
        return e[1]
    if tag == "field":
        try:
            return env[e[1]]
        except KeyError:
            raise MissingField(e[1]) from None
    if tag == "+":
        return eval_expr(e[1], env) + eval_expr(e[2], env)
    if tag == "-":
        return eval_expr(e[1], env) - eval_expr(e[2], env)
    if tag == "cmp":
        return _CMP[e[1]](eval_expr(e[2], env), eval_expr(e[3], env))
    if tag == "and":
        return eval_expr(e[1], env) and eval_expr(e[2], env)
    if tag == "or":
        return eval_expr(e[1], env) or eval_expr(e[2], env)
    if tag == "not":
        return not eval_expr(e[1], env)
    raise ValueError(f"bad expression {e!r}")


def show_expr(e, level=0):
    tag = e[0]
    if tag == "int":
        return str(e[1])
    if tag == "bool":
        return "true" if e[1] else "false"
    if tag == "field":
        return e[1]
    if tag in "+-":
        return f"{show_expr(e[1], 5)} {tag} {show_expr(e[2], 6)}"
    if tag == "cmp":
        return f"{show_expr(e[2], 5)} {e[1]} {show_expr(e[3], 5)}"
    if tag == "not":
        inner = show_expr(e[1], 3)
        return f"!({inner})" if e[1][0] == "cmp" else f"!{inner}"
    if tag == "and":
        s = f"{show_expr(e[1], 2)} && {show_expr(e[2], 3)}"
        return f"({s})" if level > 2 else s
    if tag == "or":
        s = f"{show_expr(e[1], 1)} || {show_expr(e[2], 2)}"
        return f"({s})" if level > 1 else s
    raise ValueError(f"bad expression {e!r}")


def _show_pred(e):
    return show_expr(e)


# -------------------------------------------------------------- parser

_UNARY = {"AX": lambda f: AN(Now(TOP), f), "EX": lambda f: EN(Now(TOP), f),
          "AF": lambda f: AU(Now(TOP), f), "EF": lambda f: EU(Now(TOP), f),
          "AG": AG, "EG": EG}
_ATOMS = {"obs", "done", "val", "finish"}


class _Parser:
    def __init__(self, text, vocab):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.vocab = vocab

    # token helpers
    def peek(self, k=0):
        return self.toks[self.i + k]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, *values):
        t = self.peek()
        return t[0] in ("op", "id") and t[1] in values

    def expect(self, value):
        t = self.next()
        if t[1] != value or t[0] not in ("op", "id"):
            raise FormulaSyntaxError(f"expected {value!r}, found {t[1]!r}", t[2])
        return t

    # formulas
    def formula(self):
        left = self.conj()
        while self.at("\\/"):
            self.next()
            left = self._build(Or, left, self.conj())
        return left

    def conj(self):
        left = self.until()
        while self.at("/\\"):
            self.next()
            left = self._build(And, left, self.until())
        return left

    def until(self):
        left = self.unary()
        if self.at("AU", "EU"):
            op = AU if self.next()[1] == "AU" else EU
            return self._build(op, left, self.until())
        return left

    def unary(self):
        t = self.peek()
        if t[0] == "id" and t[1] in _UNARY:
            self.next()
            body = self.unary()
            return self._build(_UNARY[t[1]], body)
        if t[0] == "id" and t[1] in ("AN", "EN"):
            self.next()
            left = self.unary()
            right = self.unary()
            return self._build(AN if t[1] == "AN" else EN, left, right)
        if self.at("("):
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        return self.atom()

    def _build(self, ctor, *args):
        try:
            return ctor(*args)
        except SortError as e:
            raise FormulaSyntaxError(str(e), self.peek()[2]) from None

    def atom(self):
        t = self.next()
        if t[0] == "op" and t[1] == "[":
            e = self.pred()
            self.expect("]")
            return Now(self._obs_pred(e, f"[{_show_pred(e)}]"))
        if t[0] != "id":
            raise FormulaSyntaxError(f"expected a formula, found {t[1]!r}", t[2])
        name = t[1]
        if name == "top":
            return Now(TOP)
        if name == "bot":
            return Now(BOT)
        if name == "Top":
            return Done(TOP_DONE)
        if name == "Bot":
            return Done(BOT_DONE)
        if name == "pure":
            return pure
        if name in _ATOMS:
            self.expect("(")
            e = self.pred()
            self.expect(")")
            text = f"{name}({_show_pred(e)})"
            if name == "obs":
                return Now(self._obs_pred(e, text))
            return Done(self._done_pred(name, e, text))
        raise FormulaSyntaxError(f"unknown atom {name!r}", t[2])

    def _obs_pred(self, e, text):
        vocab = self.vocab

        def holds(w):
            if not isinstance(w, Obs) or not isinstance(w.event, Log):
                return False
            env = dict(vocab.constants)
            env.update(vocab.observe(w.event.observation))
            try:
                return bool(eval_expr(e, env))
            except MissingField:
                return False

        return Pred(holds, text)

    def _done_pred(self, kind, e, text):
        vocab = self.vocab

        def holds(x, w):
            if kind == "val" and w is not Pure:
                return False
            if kind == "finish" and not isinstance(w, Obs):
                return False
            env = dict(vocab.constants)
            if isinstance(w, Obs) and isinstance(w.event, Log):
                env.update(vocab.observe(w.event.observation))
            env.update(vocab.value_fields(x))
            try:
                return bool(eval_expr(e, env))
            except MissingField:
                return False

        return Pred(holds, text)

    # predicates
    def pred(self):
        left = self.pred_and()
        while self.at("||"):
            self.next()
            left = ("or", left, self.pred_and())
        return left

    def pred_and(self):
        left = self.pred_not()
        while self.at("&&"):
            self.next()
            left = ("and", left, self.pred_not())
        return left

    def pred_not(self):
        if self.at("!"):
            self.next()
            return ("not", self.pred_not())
        if self.at("("):
            self.next()
            e = self.pred()
            self.expect(")")
            return e
        if self.at("true", "false"):
            return ("bool", self.next()[1] == "true")
        a = self.term()
        t = self.next()
        if t[0] != "op" or t[1] not in _CMP:
            raise FormulaSyntaxError(f"expected a comparison, found {t[1]!r}", t[2])
        return ("cmp", t[1], a, self.term())

    def term(self):
        left = self.term_atom()
        while self.at("+", "-"):
            op = self.next()[1]
            left = (op, left, self.term_atom())
        return left

    def term_atom(self):
        t = self.next()
        if t[0] == "int":
            return ("int", t[1])
        if t[0] == "id":
            return ("field", t[1])
        raise FormulaSyntaxError(f"expected a number or field, found {t[1]!r}", t[2])


def parse_formula(text, sort=PREFIX, vocab=None):
    """Parse formula text; ``sort`` is ``L`` (prefix) or ``R`` (suffix)."""
    if sort not in (PREFIX, SUFFIX):
        raise ValueError("sort must be 'L' or 'R'")
    p = _Parser(text, vocab or DEFAULT_VOCAB)
    f = p.formula()
    t = p.peek()
    if t[0] != "eof":
        raise FormulaSyntaxError(f"unexpected {t[1]!r}", t[2])
    if f.sort != sort:
        want = "prefix" if sort == PREFIX else "suffix"
        raise FormulaSyntaxError(f"expected a {want} formula, got {to_text(f)!r}")
    return f


def parse_predicate(text):
    """Parse a bare predicate expression (used for CLI invariants and rankings)."""
    p = _Parser(text, DEFAULT_VOCAB)
    e = p.pred()
    if p.peek()[0] != "eof":
        raise FormulaSyntaxError(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return e


def parse_term(text):
    p = _Parser(text, DEFAULT_VOCAB)
    e = p.term()
    if p.peek()[0] != "eof":
        raise FormulaSyntaxError(f"unexpected {p.peek()[1]!r}", p.peek()[2])
    return e
