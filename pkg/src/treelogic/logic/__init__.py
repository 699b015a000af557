"""Temporal formulas, their checkers, and the formula algebra."""

from .algebra import LAWS, Law, PatternMismatch, law, rewrite
from .check import (FAILS, HOLDS, UNKNOWN, BoundedCheck, FiniteCheck, FiniteResult, TraceStep,
                    Verdict, check, check_bounded, check_finite)
from .formula import (AF, AG, AN, AU, AX, EF, EG, EN, EU, EX, PREFIX, SUFFIX, And, Bot, Done,
                      Formula, Now, Or, Pred, SortError, Top, bot, done, done_eq, finish, logged,
                      now, obs, pure, to_text, top, val)
from .graph import (KripkeGraph, Limits, State, StateBudgetExceeded, UnkeyedState,
                    default_fingerprint, explore, fingerprint_digest, to_dot)
from .syntax import FormulaSyntaxError, Vocabulary, parse_formula

__all__ = [
    "LAWS",
    "Law",
    "PatternMismatch",
    "law",
    "rewrite",
    "FAILS",
    "HOLDS",
    "UNKNOWN",
    "BoundedCheck",
    "FiniteCheck",
    "FiniteResult",
    "TraceStep",
    "Verdict",
    "check",
    "check_bounded",
    "check_finite",
    "AF",
    "AG",
    "AN",
    "AU",
    "AX",
    "EF",
    "EG",
    "EN",
    "EU",
    "EX",
    "PREFIX",
    "SUFFIX",
    "And",
    "Bot",
    "Done",
    "Formula",
    "Now",
    "Or",
    "Pred",
    "SortError",
    "Top",
    "bot",
    "done",
    "done_eq",
    "finish",
    "logged",
    "now",
    "obs",
    "pure",
    "to_text",
    "top",
    "val",
    "KripkeGraph",
    "Limits",
    "State",
    "StateBudgetExceeded",
    "UnkeyedState",
    "default_fingerprint",
    "explore",
    "fingerprint_digest",
    "to_dot",
    "FormulaSyntaxError",
    "Vocabulary",
    "parse_formula",
]
