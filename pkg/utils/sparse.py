"""Sparse vectors with rational coordinates"""

from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, Iterable, Iterator, Mapping, Tuple, Union

Entries = Union[Mapping[Any, Any], Iterable[Tuple[Any, Any]], None]


class SparseVector:
    """Immutable finitely-supported map key -> Fraction; zero entries are never stored"""

    __slots__ = ("_items", "_hash")

    def __init__(self, entries: Entries = None):
        if entries is None:
            pairs: Iterable[Tuple[Any, Any]] = ()
        elif isinstance(entries, Mapping):
            pairs = entries.items()
        else:
            pairs = entries
        acc: Dict[Hashable, Fraction] = {}
        for key, value in pairs:
            acc[key] = acc.get(key, Fraction(0)) + Fraction(value)
        self._items = tuple(sorted(((k, v) for k, v in acc.items() if v != 0), key=lambda kv: kv[0]))
        self._hash = hash(self._items)

    @classmethod
    def unit(cls, key: Hashable, value: Any = 1) -> "SparseVector":
        return cls([(key, value)])

    @property
    def items(self) -> Tuple[Tuple[Any, Fraction], ...]:
        return self._items

    def keys(self) -> Tuple[Any, ...]:
        return tuple(k for k, _ in self._items)

    def get(self, key: Hashable) -> Fraction:
        for k, v in self._items:
            if k == key:
                return v
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._items

    def scale(self, factor: Any) -> "SparseVector":
        factor = Fraction(factor)
        if factor == 0:
            return type(self)()
        return type(self)((k, v * factor) for k, v in self._items)

    def map_keys(self, fn: Callable[[Any], "SparseVector"]) -> "SparseVector":
        """Linear extension of a key -> vector map"""
        out: Dict[Hashable, Fraction] = {}
        for key, value in self._items:
            for k2, v2 in fn(key).items:
                out[k2] = out.get(k2, Fraction(0)) + value * v2
        return type(self)(out)

    def __add__(self, other: "SparseVector") -> "SparseVector":
        return type(self)(self._items + other._items)

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        return type(self)(self._items + tuple((k, -v) for k, v in other._items))

    def __neg__(self) -> "SparseVector":
        return type(self)((k, -v) for k, v in self._items)

    def __iter__(self) -> Iterator[Tuple[Any, Fraction]]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._items)
        return f"{type(self).__name__}({{{body}}})"
