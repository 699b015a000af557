"""Formula implications and equivalences as syntactic rewrite laws."""

from __future__ import annotations

from dataclasses import dataclass, fields

from .formula import AG, AN, AU, EG, EN, EU, And, Formula, Meta, Or

p = Meta("p", "L")
q = Meta("q", "*")
phi = Meta("phi", "L")
phi2 = Meta("phi'", "L")


class PatternMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Law:
    name: str
    lhs: Formula
    rhs: Formula
    equivalence: bool
    # "LR": q may be a prefix or a suffix formula; "L": prefix only
    sorts: str

    @property
    def one_way(self):
        return not self.equivalence

    @property
    def metavars(self):
        out = []
        _collect(self.lhs, out)
        _collect(self.rhs, out)
        return list(dict.fromkeys(out))


def _collect(f, out):
    if isinstance(f, Meta):
        out.append(f)
        return
    for fl in fields(f) if hasattr(f, "__dataclass_fields__") else ():
        v = getattr(f, fl.name)
        if isinstance(v, Formula):
            _collect(v, out)


LAWS = [
    # implications (left implies right)
    Law("AN-weaken", AN(p, q), EN(p, q), False, "LR"),
    Law("AU-weaken", AU(p, q), EU(p, q), False, "LR"),
    Law("AG-weaken", AG(phi), EG(phi), False, "L"),
    Law("AN-until", AN(p, q), AU(p, q), False, "LR"),
    Law("EN-until", EN(p, q), EU(p, q), False, "LR"),
    Law("AG-M", AG(phi), phi, False, "L"),
    Law("EG-M", EG(phi), phi, False, "L"),
    Law("EG-and", EG(And(phi, phi2)), And(EG(phi), EG(phi2)), False, "L"),
    Law("AG-or", Or(AG(phi), AG(phi2)), AG(Or(phi, phi2)), False, "L"),
    Law("EG-or", Or(EG(phi), EG(phi2)), EG(Or(phi, phi2)), False, "L"),
    # equivalences
    Law("AU-unfold", AU(p, q), Or(q, AN(p, AU(p, q))), True, "LR"),
    Law("EU-unfold", EU(p, q), Or(q, EN(p, EU(p, q))), True, "LR"),
    Law("AG-unfold", AG(phi), AN(phi, AG(phi)), True, "L"),
    Law("EG-unfold", EG(phi), EN(phi, EG(phi)), True, "L"),
    Law("AU-idem", AU(p, q), AU(p, AU(p, q)), True, "LR"),
    Law("EU-idem", EU(p, q), EU(p, EU(p, q)), True, "LR"),
    Law("EG-idem", EG(EG(phi)), EG(phi), True, "L"),
    Law("AG-idem", AG(AG(phi)), AG(phi), True, "L"),
    Law("AG-and", AG(And(phi, phi2)), And(AG(phi), AG(phi2)), True, "L"),
]

LAWS_BY_NAME = {law.name: law for law in LAWS}


def law(name):
    try:
        return LAWS_BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown law {name!r}") from None


def match(pattern, f, env=None):
    """Bind pattern variables so that ``pattern`` equals ``f``, or return None."""
    env = {} if env is None else env
    if isinstance(pattern, Meta):
        if pattern.kind == "L" and f.sort != "L":
            return None
        bound = env.get(pattern)
        if bound is None:
            env[pattern] = f
            return env
        return env if bound == f else None
    if type(pattern) is not type(f):
        return None
    for fl in fields(pattern):
        a, b = getattr(pattern, fl.name), getattr(f, fl.name)
        if isinstance(a, Formula):
            if match(a, b, env) is None:
                return None
        elif a != b:
            return None
    return env


def substitute(pattern, env):
    if isinstance(pattern, Meta):
        return env[pattern]
    if not hasattr(pattern, "__dataclass_fields__"):
        return pattern
    args = []
    for fl in fields(pattern):
        v = getattr(pattern, fl.name)
        args.append(substitute(v, env) if isinstance(v, Formula) else v)
    return type(pattern)(*args)


def rewrite(f, rule, direction="forward"):
    """Rewrite the whole of ``f`` with a law.

    Equivalences may be applied in either direction; implications only
    forward, from the stronger formula to the weaker one.
    """
    if isinstance(rule, str):
        rule = law(rule)
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    if direction == "backward" and rule.one_way:
        raise PatternMismatch(f"{rule.name} is an implication and only rewrites forward")
    src, dst = (rule.lhs, rule.rhs) if direction == "forward" else (rule.rhs, rule.lhs)
    env = match(src, f)
    if env is None:
        raise PatternMismatch(f"{rule.name} does not match {f}")
    missing = [v for v in rule.metavars if v not in env]
    if missing:
        raise PatternMismatch(f"{rule.name}: {', '.join(m.name for m in missing)} unbound")
    return substitute(dst, env)
