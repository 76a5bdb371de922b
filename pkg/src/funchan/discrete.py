"""Total functions on Z_N = {0, ..., N-1} and their orbit structure.

Every channel in this package is generated from such a function.  The
analysis here is purely combinatorial: fixed points, cycles, the number of
steps an orbit needs to reach its cycle (the link length), and function
equivalence under relabeling of the N points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import CapabilityError, DomainError, RangeError

# Exhaustive canonicalization searches all N! relabelings.
CANONICAL_MAX_N = 8


@dataclass(frozen=True)
class DiscreteFunction:
    """A function f: Z_N -> Z_N stored as a lookup table.

    ``table[x]`` is f(x); every entry must lie in [0, N).
    """

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"domain size must be positive, got {self.n}")
        if len(self.table) != self.n:
            raise DomainError(
                f"table has {len(self.table)} entries, expected {self.n}"
            )
        for x, y in enumerate(self.table):
            if not (0 <= y < self.n):
                raise DomainError(f"table[{x}] = {y} is outside [0, {self.n})")
        object.__setattr__(self, "table", tuple(int(y) for y in self.table))

    @classmethod
    def from_table(cls, table: Sequence[int]) -> "DiscreteFunction":
        return cls(len(table), tuple(table))

    @classmethod
    def identity(cls, n: int) -> "DiscreteFunction":
        return cls(n, tuple(range(n)))

    @classmethod
    def constant(cls, n: int, value: int) -> "DiscreteFunction":
        if not (0 <= value < n):
            raise DomainError(f"constant value {value} outside [0, {n})")
        return cls(n, (value,) * n)

    def __call__(self, x: int) -> int:
        return evaluate(self, x)

    def iterate(self, x: int, k: int) -> int:
        """Return f^k(x)."""
        y = x
        for _ in range(k):
            y = evaluate(self, y)
        return y


@dataclass(frozen=True)
class OrbitAnalysis:
    """Full orbit structure of a DiscreteFunction.

    cycles are listed in iteration order, rotated so the smallest element
    comes first, and sorted by that element.  ``period_of[x]`` is the length
    of the cycle the orbit of x eventually enters; ``link_length_of[x]`` is
    the number of steps needed to enter it (0 exactly when x already lies on
    a cycle).  ``image_size`` is the number of distinct values taken by f.
    """

    fixed_points: frozenset[int]
    cycles: tuple[tuple[int, ...], ...]
    period_of: tuple[int, ...]
    link_length_of: tuple[int, ...]
    image_size: int

    def max_link_length(self) -> int:
        return max(self.link_length_of)

    def period_lcm(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles))


def evaluate(f: DiscreteFunction, x: int) -> int:
    """Return f(x), rejecting x outside [0, N)."""
    if not (0 <= x < f.n):
        raise DomainError(f"argument {x} outside [0, {f.n})")
    return f.table[x]


def analyze(f: DiscreteFunction) -> OrbitAnalysis:
    """Compute fixed points, cycles, periods and link lengths in O(N).

    Each start is walked at most once; by the pigeonhole principle every
    walk repeats within N steps, so termination is unconditional.
    """
    n = f.n
    period = [0] * n
    link = [0] * n
    # 0 = untouched, 1 = on the current walk, 2 = resolved
    state = [0] * n
    pos_on_walk: dict[int, int] = {}
    cycles: list[tuple[int, ...]] = []

    for start in range(n):
        if state[start] == 2:
            continue
        walk: list[int] = []
        pos_on_walk.clear()
        x = start
        while state[x] == 0:
            state[x] = 1
            pos_on_walk[x] = len(walk)
            walk.append(x)
            x = f.table[x]
        if state[x] == 1:
            # Closed a new cycle at position pos_on_walk[x] of this walk.
            entry = pos_on_walk[x]
            cycle = walk[entry:]
            p = len(cycle)
            for node in cycle:
                period[node] = p
                link[node] = 0
            m = min(cycle)
            i = cycle.index(m)
            cycles.append(tuple(cycle[i:] + cycle[:i]))
            tail = walk[:entry]
            base_link = 0
        else:
            # Merged into an already resolved node.
            tail = walk
            p = period[x]
            base_link = link[x]
        for dist, node in enumerate(reversed(tail), start=1):
            period[node] = p
            link[node] = base_link + dist
        for node in walk:
            state[node] = 2

    cycles.sort(key=lambda c: c[0])
    return OrbitAnalysis(
        fixed_points=frozenset(x for x in range(n) if f.table[x] == x),
        cycles=tuple(cycles),
        period_of=tuple(period),
        link_length_of=tuple(link),
        image_size=len(set(f.table)),
    )


def logistic(mu: Fraction | float) -> Callable:
    """Return the map x -> mu*x*(1-x) on the unit interval.

    mu must lie in [0, 4]; outside that range iterates escape the unit
    interval.  Passing a Fraction keeps the arithmetic exact, which is what
    the dyadic truncation below relies on.
    """
    if not (0 <= mu <= 4):
        raise DomainError(f"logistic parameter {mu} outside [0, 4]")

    def g(x):
        return mu * x * (1 - x)

    return g


def truncate_map(g: Callable, n_qubits: int) -> DiscreteFunction:
    """Discretize a unit-interval map onto the dyadic grid of 2**n_qubits points.

    f(x) = floor(g(x / 2**n) * 2**n).  Grid points are fed to g as exact
    Fractions, so a rational g is truncated without rounding error.  A value
    of exactly 1.0 would floor to 2**n; it is clamped to 2**n - 1 so the
    result stays inside Z_N.
    """
    if n_qubits < 1:
        raise DomainError(f"n_qubits must be >= 1, got {n_qubits}")
    size = 2**n_qubits
    table = []
    for x in range(size):
        value = g(Fraction(x, size))
        if not (0 <= value <= 1):
            raise RangeError(f"map value {value} at x={x} outside [0, 1]")
        fx = math.floor(value * size)
        if fx == size:
            fx = size - 1
        table.append(fx)
    return DiscreteFunction(size, tuple(table))


def conjugate(f: DiscreteFunction, sigma: Sequence[int]) -> DiscreteFunction:
    """Relabel points by the permutation sigma: returns sigma o f o sigma^-1."""
    n = f.n
    if sorted(sigma) != list(range(n)):
        raise DomainError("sigma is not a permutation of the domain")
    table = [0] * n
    for x in range(n):
        table[sigma[x]] = sigma[f.table[x]]
    return DiscreteFunction(n, tuple(table))


def canonical_form(f: DiscreteFunction) -> DiscreteFunction:
    """Smallest relabeling of f; equal canonical forms mean equivalent functions.

    Minimizes the lookup table lexicographically over all N! relabelings,
    so two functions are conjugate under a permutation of Z_N iff their
    canonical forms coincide.  Exhaustive, hence capped at N <= 8.
    """
    if f.n > CANONICAL_MAX_N:
        raise CapabilityError(
            f"canonical form is exhaustive and capped at N <= {CANONICAL_MAX_N}"
        )
    best = None
    for sigma in itertools.permutations(range(f.n)):
        table = [0] * f.n
        for x in range(f.n):
            table[sigma[x]] = sigma[f.table[x]]
        candidate = tuple(table)
        if best is None or candidate < best:
            best = candidate
    return DiscreteFunction(f.n, best)
