"""Rank-1 constraint systems over the BN254 scalar field.

A constraint is a triple of linear combinations ``(A, B, C)`` asserting
``<A, w> * <B, w> = <C, w>`` for the assignment vector ``w``.  Variable 0 is
the constant one; public variables occupy indices ``1..n_public``.

Gadgets allocate variables together with a *hint*, a function computing the
variable's value from the partial assignment, so one description serves both
constraint generation and witness solving.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

from .field import P


class LC:
    """Sparse linear combination ``{variable index: coefficient}``."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, int] | None = None):
        self.terms = {k: v % P for k, v in (terms or {}).items() if v % P}

    @classmethod
    def const(cls, value: int) -> "LC":
        return cls({0: value})

    def __add__(self, other):
        other = _lc(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = (out.get(k, 0) + v) % P
        return LC(out)

    __radd__ = __add__

    def __neg__(self):
        return LC({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_lc(other))

    def __rsub__(self, other):
        return _lc(other) - self

    def __mul__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        return LC({i: v * k for i, v in self.terms.items()})

    __rmul__ = __mul__

    def evaluate(self, w) -> int:
        return sum(v * w[k] for k, v in self.terms.items()) % P

    def __repr__(self):
        return f"LC({self.terms})"


def _lc(x) -> LC:
    if isinstance(x, LC):
        return x
    if isinstance(x, int):
        return LC.const(x)
    raise TypeError(f"cannot use {type(x).__name__} in a linear combination")


@dataclass(frozen=True)
class Constraint:
    a: dict[int, int]
    b: dict[int, int]
    c: dict[int, int]


@dataclass
class ConstraintSystem:
    names: list[str] = field(default_factory=lambda: ["one"])
    n_public: int = 0
    constraints: list[Constraint] = field(default_factory=list)
    _inputs: dict[str, int] = field(default_factory=dict)
    _hints: list[tuple[int, Callable]] = field(default_factory=list)

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def _alloc(self, name: str) -> int:
        self.names.append(name)
        return len(self.names) - 1

    def public(self, name: str, *, computed: bool = False) -> LC:
        if self.n_public != self.n_vars - 1:
            raise ValueError("public variables must be allocated first")
        idx = self._alloc(name)
        self.n_public += 1
        if not computed:
            self._inputs[name] = idx
        return LC({idx: 1})

    def private(self, name: str) -> LC:
        idx = self._alloc(name)
        self._inputs[name] = idx
        return LC({idx: 1})

    def witness(self, name: str, hint: Callable) -> LC:
        idx = self._alloc(name)
        self._hints.append((idx, hint))
        return LC({idx: 1})

    def bind(self, target: LC, hint: Callable) -> None:
        """Attach a hint to a variable allocated earlier with ``computed=True``."""
        (idx,) = target.terms
        self._hints.append((idx, hint))

    def enforce(self, a, b, c) -> None:
        self.constraints.append(Constraint(_lc(a).terms, _lc(b).terms, _lc(c).terms))

    def mul(self, a, b, name: str) -> LC:
        """New variable constrained to ``a * b``."""
        a, b = _lc(a), _lc(b)
        out = self.witness(name, lambda w: a.evaluate(w) * b.evaluate(w) % P)
        self.enforce(a, b, out)
        return out

    def solve(self, **inputs: int) -> list[int]:
        """Compute a full assignment from named inputs by running every hint."""
        missing = set(self._inputs) - set(inputs)
        if missing:
            raise ValueError(f"missing inputs: {sorted(missing)}")
        w = [0] * self.n_vars
        w[0] = 1
        for name, value in inputs.items():
            if name not in self._inputs:
                raise ValueError(f"unknown input {name!r}")
            w[self._inputs[name]] = value % P
        for idx, hint in self._hints:
            w[idx] = hint(w) % P
        return w

    def is_satisfied(self, w) -> bool:
        if len(w) != self.n_vars or w[0] != 1:
            return False
        return self.first_violation(w) is None

    def first_violation(self, w) -> int | None:
        for i, con in enumerate(self.constraints):
            a = sum(v * w[k] for k, v in con.a.items())
            b = sum(v * w[k] for k, v in con.b.items())
            c = sum(v * w[k] for k, v in con.c.items())
            if (a * b - c) % P:
                return i
        return None

    def digest(self) -> bytes:
        """Stable fingerprint of the constraint matrices and public layout."""
        h = hashlib.sha256()
        h.update(f"r1cs:{self.n_vars}:{self.n_public}:{self.n_constraints}".encode())
        for con in self.constraints:
            for part in (con.a, con.b, con.c):
                h.update(b"|")
                for k in sorted(part):
                    h.update(k.to_bytes(4, "big") + part[k].to_bytes(32, "big"))
        return h.digest()
