"""Kraus sets generated from a function and a partition into disjoint sets.

A partition {S_j} of Z_N on which f is injective set-by-set generates one
Kraus operator per set, K_j = sum_{i in S_j} |f(i)><i|.  The partition
choice controls how much coherence the channel preserves: singleton sets
give the completely dephasing channel, coarser valid partitions keep
superpositions alive inside each set.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channels import DensityOperator, KrausSet, ketbra
from .discrete import DiscreteFunction, analyze
from .errors import CapabilityError, DomainError, ShapeError, ValidationError

# Partition enumeration is Bell-number sized; Bell(8) = 4140 is the cap.
ENUMERATION_MAX_N = 8

_FAMILY_TOKEN = re.compile(r"\(([^()]*)\)")


@dataclass(frozen=True)
class DisjointSetFamily:
    """A partition of Z_N in canonical order.

    Each set is stored as an ascending tuple and the sets are ordered by
    their minimum element, so equal partitions compare equal and generate
    Kraus operators in a reproducible order.
    """

    n: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for s in self.sets:
            if not s:
                raise ValidationError("family contains an empty set")
            if seen.intersection(s):
                raise ValidationError(f"family sets overlap at {seen.intersection(s)}")
            seen.update(s)
        if seen != set(range(self.n)):
            missing = sorted(set(range(self.n)) - seen)
            raise ValidationError(f"family does not cover Z_{self.n}: missing {missing}")
        canonical = tuple(sorted((tuple(sorted(s)) for s in self.sets), key=min))
        object.__setattr__(self, "sets", canonical)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]]) -> "DisjointSetFamily":
        return cls(n, tuple(tuple(s) for s in sets))

    @classmethod
    def singletons(cls, n: int) -> "DisjointSetFamily":
        return cls(n, tuple((i,) for i in range(n)))

    @classmethod
    def whole(cls, n: int) -> "DisjointSetFamily":
        return cls(n, (tuple(range(n)),))

    @classmethod
    def parse(cls, text: str, n: int) -> "DisjointSetFamily":
        """Parse the literal syntax "(2,3)(0,1)"; whitespace is ignored."""
        compact = re.sub(r"\s+", "", text)
        groups = _FAMILY_TOKEN.findall(compact)
        if not groups or _FAMILY_TOKEN.sub("", compact):
            raise ValidationError(f"cannot parse family literal {text!r}")
        sets = []
        for group in groups:
            try:
                sets.append(tuple(int(tok) for tok in group.split(",") if tok))
            except ValueError as exc:
                raise ValidationError(f"bad integer in family literal: {exc}") from exc
        return cls(n, tuple(sets))

    @property
    def rank(self) -> int:
        return len(self.sets)

    def set_index_of(self, x: int) -> int:
        for j, s in enumerate(self.sets):
            if x in s:
                return j
        raise DomainError(f"{x} is not in the partitioned domain")

    def __str__(self):
        return "".join("(" + ",".join(str(i) for i in s) + ")" for s in self.sets)


@dataclass(frozen=True)
class GeneratedChannel:
    """A function, a validated family, and the Kraus set they generate."""

    f: DiscreteFunction
    family: DisjointSetFamily
    kraus: KrausSet


def validate_family(f: DiscreteFunction, family: DisjointSetFamily) -> bool:
    """True iff f is injective on every set of the family."""
    if family.n != f.n:
        raise ShapeError(f"family on Z_{family.n} but function on Z_{f.n}")
    return all(len({f.table[i] for i in s}) == len(s) for s in family.sets)


def _offending_sets(f: DiscreteFunction, family: DisjointSetFamily) -> list[tuple[int, ...]]:
    return [s for s in family.sets if len({f.table[i] for i in s}) != len(s)]


def generate_kraus(f: DiscreteFunction, family: DisjointSetFamily) -> GeneratedChannel:
    """Build K_j = sum_{i in S_j} |f(i)><i| for each set, in family order.

    The operators have 0/1 entries, so the completeness relation holds
    exactly.  Raises ValidationError naming the sets on which f collides.
    """
    if not validate_family(f, family):
        bad = _offending_sets(f, family)
        raise ValidationError(
            f"f is not injective on {bad}; the generated operators would not be complete"
        )
    ops = []
    for s in family.sets:
        k = np.zeros((f.n, f.n), dtype=complex)
        for i in s:
            k[f.table[i], i] = 1.0
        ops.append(k)
    return GeneratedChannel(f=f, family=family, kraus=KrausSet(ops))


def full_dephasing_family(f: DiscreteFunction) -> GeneratedChannel:
    """The singleton-family channel: rank N, completely dephasing."""
    return generate_kraus(f, DisjointSetFamily.singletons(f.n))


def min_kraus_rank(f: DiscreteFunction) -> int:
    """N - |f(Z_N)| + 1, the completeness-driven floor on the set count."""
    return f.n - len(set(f.table)) + 1


def _set_partitions(n: int):
    """Yield all partitions of range(n), blocks ordered by minimum element."""
    blocks: list[list[int]] = []

    def place(x: int):
        if x == n:
            yield tuple(tuple(b) for b in blocks)
            return
        for b in blocks:
            b.append(x)
            yield from place(x + 1)
            b.pop()
        blocks.append([x])
        yield from place(x + 1)
        blocks.pop()

    yield from place(0)


def enumerate_valid_families(
    f: DiscreteFunction, max_rank: int | None = None
) -> list[DisjointSetFamily]:
    """All partitions of Z_N on which f is set-wise injective.

    Ordered by (rank, sets) so enumeration output is deterministic.  Capped
    at N <= 8 because the search space is Bell(N).
    """
    if f.n > ENUMERATION_MAX_N:
        raise CapabilityError(
            f"family enumeration is exhaustive and capped at N <= {ENUMERATION_MAX_N}"
        )
    limit = f.n if max_rank is None else max_rank
    found = []
    for blocks in _set_partitions(f.n):
        if len(blocks) > limit:
            continue
        if all(len({f.table[i] for i in b}) == len(b) for b in blocks):
            found.append(DisjointSetFamily(f.n, blocks))
    found.sort(key=lambda fam: (fam.rank, fam.sets))
    return found


def cycle_through(f: DiscreteFunction, x: int) -> tuple[int, ...]:
    """The cycle containing x in iteration order, smallest element first.

    Raises DomainError when the orbit of x only reaches a cycle rather than
    lying on one.
    """
    info = analyze(f)
    if info.link_length_of[x] != 0:
        raise DomainError(f"{x} is not on a cycle (link length {info.link_length_of[x]})")
    for cycle in info.cycles:
        if x in cycle:
            return cycle
    raise DomainError(f"{x} is not on a cycle")  # pragma: no cover


def cycle_fixed_point(f: DiscreteFunction, x: int) -> DensityOperator:
    """The uniform mixture over a cycle's states, a fixed point of any
    channel generated from f.

    (1/k) sum_j |f^j(x)><f^j(x)| for the k-cycle through x; the same
    operator is returned for every x on the cycle.
    """
    cycle = cycle_through(f, x)
    m = sum(ketbra(f.n, i, i) for i in cycle) / len(cycle)
    return DensityOperator(m)


def cycle_eigenvectors(
    f: DiscreteFunction, x: int
) -> list[tuple[complex, np.ndarray]]:
    """Fourier combinations over a k-cycle and their unit-modulus eigenvalues.

    Returns k pairs (w^-m, rho_m) with w = exp(2 pi i / k) and
    rho_m = (1/k) sum_j w^(m j) |f^j(x)><f^j(x)|.  Each rho_m is mapped to
    w^-m rho_m by every channel generated from f.
    """
    cycle = cycle_through(f, x)
    k = len(cycle)
    omega = np.exp(2j * np.pi / k)
    pairs = []
    for m in range(k):
        op = np.zeros((f.n, f.n), dtype=complex)
        for j, node in enumerate(cycle):
            op[node, node] = omega ** (m * j) / k
        pairs.append((omega ** (-m), op))
    return pairs


def all_functions(n: int):
    """Iterate every f: Z_n -> Z_n in lexicographic table order."""
    for table in itertools.product(range(n), repeat=n):
        yield DiscreteFunction(n, table)


def all_generated_channels(n: int, max_rank: int | None = None):
    """Iterate (f, family, channel) over every function and valid family."""
    for f in all_functions(n):
        for fam in enumerate_valid_families(f, max_rank):
            yield f, fam, generate_kraus(f, fam)
