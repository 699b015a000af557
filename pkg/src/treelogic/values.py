"""Small immutable value types shared by trees, worlds and scenarios."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass


@dataclass(frozen=True)
class Inl:
    """Left injection: a loop body asking for another iteration."""

    value: object

    def __repr__(self):
        return f"inl({self.value!r})"


@dataclass(frozen=True)
class Inr:
    """Right injection: a loop body returning its final result."""

    value: object

    def __repr__(self):
        return f"inr({self.value!r})"


def _order(key):
    return (type(key).__name__, key) if isinstance(key, (int, str)) else (type(key).__name__, repr(key))


class FMap(Mapping):
    """Hashable finite map with deterministic iteration order.

    Used for stores, heaps and mailboxes so they can sit inside state
    fingerprints.
    """

    __slots__ = ("_dict", "_items", "_hash")

    def __init__(self, items=()):
        d = dict(items)
        self._dict = d
        self._items = tuple(sorted(d.items(), key=lambda kv: _order(kv[0])))
        self._hash = None

    def __getitem__(self, key):
        return self._dict[key]

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __eq__(self, other):
        if isinstance(other, FMap):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._dict == dict(other)
        return NotImplemented

    def set(self, key, value):
        d = dict(self._dict)
        d[key] = value
        return FMap(d)

    def __repr__(self):
        return "{" + ", ".join(f"{k}: {v!r}" for k, v in self._items) + "}"
