"""Counting functions up to relabeling, and the small-system channel catalog.

Two independent counting routes are kept deliberately separate: an exact
partition-sum formula (Burnside average over conjugacy classes of the
symmetric group) and a brute-force orbit walk over all n^n lookup tables.
The catalog lists every (function, family) class for N in {2, 3} together
with its spectrum, labeled A..G by function class with the Kraus rank as
subscript.
"""

from __future__ import annotations

import io
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .discrete import DiscreteFunction, canonical_form, conjugate
from .errors import CapabilityError, DomainError
from .families import (
    DisjointSetFamily,
    GeneratedChannel,
    all_functions,
    enumerate_valid_families,
    generate_kraus,
)
from .liouville import SpectralReport, channel_spectrum
from .parallel import ordered_map

BRUTE_FORCE_MAX_N = 6
COMMUTING_BRUTE_FORCE_MAX_N = 5


def _partition_multiplicities(n: int):
    """Yield integer partitions of n as multiplicity tuples (l_1, ..., l_n),
    where l_i counts the parts equal to i."""

    def rec(remaining: int, largest: int, counts: list[int]):
        if remaining == 0:
            yield tuple(counts)
            return
        for part in range(min(remaining, largest), 0, -1):
            counts[part - 1] += 1
            yield from rec(remaining - part, part, counts)
            counts[part - 1] -= 1

    yield from rec(n, n, [0] * n)


def _partition_term(n: int, lambdas: tuple[int, ...]) -> Fraction:
    """Weight of one cycle-type: (prod_k (sum_{j|k} j*l_j)^l_k) / (aut factor).

    The 0^0 = 1 convention is load-bearing: cycle lengths with zero
    multiplicity contribute a factor 1 even when the divisor sum vanishes.
    """
    denom = 1
    for i, li in enumerate(lambdas, start=1):
        denom *= math.factorial(li) * i**li
    num = 1
    for k in range(1, n + 1):
        lk = lambdas[k - 1]
        if lk == 0:
            continue
        divisor_sum = sum(j * lambdas[j - 1] for j in range(1, k + 1) if k % j == 0)
        num *= divisor_sum**lk
    return Fraction(num, denom)


def count_functions_formula(n: int) -> int:
    """Number of functions Z_n -> Z_n up to relabeling, by the partition sum.

    Exact rational arithmetic throughout; a non-integer total would mean
    the formula (or this implementation) is wrong, so it raises.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    total = sum(
        (_partition_term(n, lambdas) for lambdas in _partition_multiplicities(n)),
        start=Fraction(0),
    )
    if total.denominator != 1:
        raise ArithmeticError(f"partition sum is not an integer: {total}")
    return int(total)


def count_functions_bruteforce(n: int) -> int:
    """Count conjugation orbits by walking them; independent of the formula.

    Every n^n lookup table is visited once; each newly seen table has its
    whole orbit {sigma o f o sigma^-1} marked, so the work is
    O(n^n + orbits * n! * n).
    """
    if n > BRUTE_FORCE_MAX_N:
        raise CapabilityError(f"brute-force count capped at n <= {BRUTE_FORCE_MAX_N}")
    perms = list(itertools.permutations(range(n)))
    seen: set[tuple[int, ...]] = set()
    orbits = 0
    for table in itertools.product(range(n), repeat=n):
        if table in seen:
            continue
        orbits += 1
        for sigma in perms:
            image = [0] * n
            for x in range(n):
                image[sigma[x]] = sigma[table[x]]
            seen.add(tuple(image))
    return orbits


def canonical_function_classes(n: int) -> list[DiscreteFunction]:
    """Canonical representative of every function class, sorted by table."""
    if n > BRUTE_FORCE_MAX_N:
        raise CapabilityError(f"class enumeration capped at n <= {BRUTE_FORCE_MAX_N}")
    reps: set[tuple[int, ...]] = set()
    seen: set[tuple[int, ...]] = set()
    perms = list(itertools.permutations(range(n)))
    for table in itertools.product(range(n), repeat=n):
        if table in seen:
            continue
        orbit = set()
        for sigma in perms:
            image = [0] * n
            for x in range(n):
                image[sigma[x]] = sigma[table[x]]
            orbit.add(tuple(image))
        seen.update(orbit)
        reps.add(min(orbit))
    return [DiscreteFunction(n, rep) for rep in sorted(reps)]


def commuting_pairs_count(n: int) -> int:
    """Ordered pairs (tau, f) with tau o f = f o tau, by the partition sum.

    Same cycle-type weights as count_functions_formula but with the n!
    prefactor kept inside each term, so dividing the result by n! is a
    genuine consistency check rather than an identity.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    total = Fraction(0)
    for lambdas in _partition_multiplicities(n):
        total += math.factorial(n) * _partition_term(n, lambdas)
    if total.denominator != 1:
        raise ArithmeticError(f"pair sum is not an integer: {total}")
    return int(total)


def commuting_pairs_bruteforce(n: int) -> int:
    """Count commuting (permutation, function) pairs by direct checking."""
    if n > COMMUTING_BRUTE_FORCE_MAX_N:
        raise CapabilityError(
            f"pair brute force capped at n <= {COMMUTING_BRUTE_FORCE_MAX_N}"
        )
    count = 0
    for tau in itertools.permutations(range(n)):
        for table in itertools.product(range(n), repeat=n):
            if all(tau[table[x]] == table[tau[x]] for x in range(n)):
                count += 1
    return count


# --- channel catalog ---------------------------------------------------------


@dataclass(frozen=True)
class CatalogEntry:
    label: str
    function_class: str
    channel: GeneratedChannel
    report: SpectralReport
    unitary: bool

    @property
    def kraus_rank(self) -> int:
        return len(self.channel.kraus.operators)


# Per-class representative tables and the labeled (function, family) pairs.
# The two- and three-state families below are exactly the published small-
# system listings; letters follow the function-class naming and the numeric
# subscript is the Kraus rank, with a/b distinguishing inequivalent
# families of equal rank.
_CLASS_TABLES = {
    2: {"A": (1, 1), "B": (0, 1), "C": (1, 0)},
    3: {
        "A": (1, 1, 1),
        "B": (0, 1, 2),
        "C": (1, 2, 0),
        "D": (1, 0, 1),
        "E": (1, 0, 2),
        "F": (1, 1, 2),
        "G": (1, 2, 2),
    },
}

_CATALOG_SPECS = {
    2: [
        ("B_1", "B", ((0, 1),)),
        ("C_1", "C", ((0, 1),)),
        ("A_2", "A", ((0,), (1,))),
        ("B_2", "B", ((0,), (1,))),
        ("C_2", "C", ((0,), (1,))),
    ],
    3: [
        ("B_1", "B", ((0, 1, 2),)),
        ("C_1", "C", ((0, 1, 2),)),
        ("E_1", "E", ((0, 1, 2),)),
        ("B_2", "B", ((0, 1), (2,))),
        ("C_2", "C", ((0, 1), (2,))),
        ("D_2a", "D", ((0, 1), (2,))),
        ("D_2b", "D", ((0,), (1, 2))),
        ("E_2a", "E", ((0, 1), (2,))),
        ("E_2b", "E", ((0, 2), (1,))),
        ("F_2a", "F", ((0, 2), (1,))),
        ("F_2b", "F", ((0,), (1, 2))),
        ("G_2a", "G", ((0, 1), (2,))),
        ("G_2b", "G", ((0, 2), (1,))),
        ("A_3", "A", ((0,), (1,), (2,))),
        ("B_3", "B", ((0,), (1,), (2,))),
        ("C_3", "C", ((0,), (1,), (2,))),
        ("D_3", "D", ((0,), (1,), (2,))),
        ("E_3", "E", ((0,), (1,), (2,))),
        ("F_3", "F", ((0,), (1,), (2,))),
        ("G_3", "G", ((0,), (1,), (2,))),
    ],
}


def catalog_channels(n: int) -> list[tuple[str, str, GeneratedChannel]]:
    """The labeled (function, family) pairs without spectral analysis."""
    if n not in _CATALOG_SPECS:
        raise DomainError(f"catalog is defined for n in {{2, 3}}, got {n}")
    out = []
    for label, cls, family_sets in _CATALOG_SPECS[n]:
        f = DiscreteFunction.from_table(_CLASS_TABLES[n][cls])
        family = DisjointSetFamily.from_sets(n, family_sets)
        out.append((label, cls, generate_kraus(f, family)))
    return out


def build_catalog(n: int) -> list[CatalogEntry]:
    """Catalog with full spectra, in rank-then-label order."""
    labeled = catalog_channels(n)

    def analyze_one(item):
        label, cls, channel = item
        report = channel_spectrum(channel.kraus)
        unitary = False
        if len(channel.kraus.operators) == 1:
            k0 = channel.kraus.operators[0]
            unitary = bool(
                np.array_equal(k0 @ k0.conj().T, np.eye(channel.f.n, dtype=complex))
            )
        return CatalogEntry(
            label=label,
            function_class=cls,
            channel=channel,
            report=report,
            unitary=unitary,
        )

    return ordered_map(analyze_one, labeled)


def channel_class_key(f: DiscreteFunction, family: DisjointSetFamily):
    """Canonical form of a (function, family) pair under joint relabeling.

    Two pairs generate equivalent channels (equal up to a basis
    permutation) iff their keys match; used to verify the catalog covers
    every class exactly once.
    """
    best = None
    for sigma in itertools.permutations(range(f.n)):
        table = tuple(conjugate(f, sigma).table)
        sets = tuple(sorted(tuple(sorted(sigma[i] for i in s)) for s in family.sets))
        key = (table, sets)
        if best is None or key < best:
            best = key
    return best


def all_channel_classes(n: int) -> set:
    """Every distinct generated-channel class on Z_n, by exhaustive search."""
    keys = set()
    for f in all_functions(n):
        for family in enumerate_valid_families(f):
            keys.add(channel_class_key(f, family))
    return keys


def catalog_to_json(entries: list[CatalogEntry]) -> str:
    payload = []
    for e in entries:
        payload.append(
            {
                "label": e.label,
                "function_table": list(e.channel.f.table),
                "family": str(e.channel.family),
                "kraus_rank": e.kraus_rank,
                "eigenvalues": [
                    {"re": round(v.real, 12), "im": round(v.imag, 12)}
                    for v in e.report.eigenvalues
                ],
                "flags": {
                    "unital": e.report.flags.unital,
                    "dephasing": e.report.flags.dephasing,
                    "ergodic": e.report.flags.ergodic,
                    "mixing": e.report.flags.mixing,
                    "unitary": e.unitary,
                },
                "zero_chains": list(e.report.zero_jordan_chain_lengths),
            }
        )
    return json.dumps(payload, indent=2) + "\n"


def catalog_to_csv(entries: list[CatalogEntry]) -> str:
    out = io.StringIO()
    out.write(
        "label,function_table,family,kraus_rank,eigenvalues,"
        "unital,dephasing,ergodic,mixing,unitary,zero_chains\n"
    )
    for e in entries:
        eigs = ";".join(
            f"{round(v.real, 9)}{round(v.imag, 9):+}j" for v in e.report.eigenvalues
        )
        chains = ";".join(str(c) for c in e.report.zero_jordan_chain_lengths)
        table = ";".join(str(t) for t in e.channel.f.table)
        out.write(
            f"{e.label},{table},{e.channel.family},{e.kraus_rank},{eigs},"
            f"{e.report.flags.unital},{e.report.flags.dephasing},"
            f"{e.report.flags.ergodic},{e.report.flags.mixing},{e.unitary},{chains}\n"
        )
    return out.getvalue()
