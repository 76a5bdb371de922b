"""Explicit circuit realizations of the generated channels.

Everything here is a permutation matrix acting on one composite register
(composite index convention: the first subsystem is the slow index, so a
state |a>|b> sits at a*dim_b + b).  The channels arise by conjugating with
those permutations, re-initializing the ancilla register, and tracing it
out; all constructions are exact 0/1 arithmetic.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .channels import (
    DensityOperator,
    KrausSet,
    apply_to_matrix,
    ketbra,
    partial_trace_a,
    partial_trace_a_matrix,
    reset_set_bipartite,
)
from .discrete import DiscreteFunction
from .errors import DomainError, ShapeError
from .families import (
    DisjointSetFamily,
    GeneratedChannel,
    full_dephasing_family,
    generate_kraus,
    validate_family,
)


def permutation_matrix(dim: int, image: Callable[[int], int]) -> np.ndarray:
    """Unitary with P|x> = |image(x)>; image must be a bijection on range(dim)."""
    targets = [image(x) for x in range(dim)]
    if sorted(targets) != list(range(dim)):
        raise DomainError("index map is not a bijection, cannot build a unitary")
    p = np.zeros((dim, dim), dtype=complex)
    for x, y in enumerate(targets):
        p[y, x] = 1.0
    return p


def oracle_unitary(f: DiscreteFunction) -> np.ndarray:
    """Reversible embedding of f: |x>_A |y>_B -> |x>_A |y + f(x) mod N>_B."""
    n = f.n
    return permutation_matrix(
        n * n, lambda idx: (idx // n) * n + (idx % n + f.table[idx // n]) % n
    )


def swap_unitary(n: int) -> np.ndarray:
    """Exchange two n-dimensional registers: |x>|y> -> |y>|x>."""
    if n < 1:
        raise DomainError(f"register dimension must be positive, got {n}")
    return permutation_matrix(n * n, lambda idx: (idx % n) * n + idx // n)


def marker_unitary(f: DiscreteFunction, family: DisjointSetFamily) -> np.ndarray:
    """Tag each basis state with the index of the set containing it.

    |i>_S |x>_B -> |i + j(x) mod n_K>_S |x>_B where j(x) indexes the family
    set holding x.  The S register has one state per set, and the addition
    makes the marking reversible.
    """
    if not validate_family(f, family):
        generate_kraus(f, family)  # raises with the offending sets named
    n, rank = f.n, family.rank
    set_of = [family.set_index_of(x) for x in range(n)]
    return permutation_matrix(
        rank * n, lambda idx: ((idx // n + set_of[idx % n]) % rank) * n + idx % n
    )


def completed_permutations(
    f: DiscreteFunction, family: DisjointSetFamily
) -> list[tuple[int, ...]]:
    """One permutation of Z_N per set, agreeing with f on that set.

    Since f is injective on S_j, it can be extended to a bijection; the
    domain elements outside S_j are paired with the codomain elements
    outside f(S_j) in ascending order, which fixes the extension uniquely.
    """
    perms = []
    for s in family.sets:
        n = f.n
        pi = [-1] * n
        used = set()
        for x in s:
            pi[x] = f.table[x]
            used.add(f.table[x])
        free_targets = [y for y in range(n) if y not in used]
        free_sources = [x for x in range(n) if pi[x] == -1]
        for x, y in zip(free_sources, free_targets):
            pi[x] = y
        perms.append(tuple(pi))
    return perms


def set_permutation_unitary(f: DiscreteFunction, family: DisjointSetFamily) -> np.ndarray:
    """Apply the set's completed permutation, controlled on the marker.

    |j>_S |x>_B -> |j>_S |pi_j(x)>_B with pi_j from completed_permutations.
    """
    if not validate_family(f, family):
        generate_kraus(f, family)  # raises with details
    n, rank = f.n, family.rank
    perms = completed_permutations(f, family)
    return permutation_matrix(
        rank * n, lambda idx: (idx // n) * n + perms[idx // n][idx % n]
    )


class GeneratedChannelCircuit:
    """Prebuilt marker / permute / reset circuit for one (f, family) pair.

    Holding the unitaries makes repeated runs cheap; ``run`` performs the
    faithful sequence: prepare |0><0|_S x rho_B, mark the sets, apply the
    controlled permutations, re-initialize the S register, take the B
    marginal.
    """

    __slots__ = ("f", "family", "unitary", "reset")

    def __init__(self, f: DiscreteFunction, family: DisjointSetFamily):
        self.f = f
        self.family = family
        self.unitary = set_permutation_unitary(f, family) @ marker_unitary(f, family)
        self.reset = reset_set_bipartite(family.rank, f.n)

    def run(self, rho_b: DensityOperator) -> DensityOperator:
        if rho_b.dim != self.f.n:
            raise ShapeError(f"input dim {rho_b.dim} != function domain {self.f.n}")
        rank = self.family.rank
        state = np.kron(ketbra(rank, 0, 0), rho_b.matrix)
        state = self.unitary @ state @ self.unitary.conj().T
        state = apply_to_matrix(self.reset, state)
        return partial_trace_a(DensityOperator(state), rank, self.f.n)


def run_generated_channel_circuit(
    f: DiscreteFunction, family: DisjointSetFamily, rho_b: DensityOperator
) -> DensityOperator:
    """One-shot convenience wrapper around GeneratedChannelCircuit.

    Agrees with direct application of the generated Kraus set.
    """
    return GeneratedChannelCircuit(f, family).run(rho_b)


def run_oracle_channel_circuit(
    f: DiscreteFunction, rho_b: DensityOperator, reset_first: bool = False
) -> DensityOperator:
    """Two-register oracle circuit realizing the completely dephasing channel.

    With reset_first=False the ancilla is re-initialized after the oracle
    (so an entangled intermediate state is explicitly broken); with
    reset_first=True the re-initialization opens the iteration instead.
    Both orderings induce the same channel on the B register.
    """
    n = f.n
    if rho_b.dim != n:
        raise ShapeError(f"input dim {rho_b.dim} != function domain {n}")
    w = oracle_unitary(f) @ swap_unitary(n)
    state = np.kron(ketbra(n, 0, 0), rho_b.matrix)
    state = w @ state @ w.conj().T
    if not reset_first:
        state = apply_to_matrix(reset_set_bipartite(n, n), state)
    return DensityOperator(partial_trace_a_matrix(state, n, n))


def oracle_channel(f: DiscreteFunction) -> GeneratedChannel:
    """The Kraus form of the oracle circuit: |f(j)><j| for each j."""
    return full_dephasing_family(f)


# --- Euclidean-algorithm channel -------------------------------------------


def gcd_channel_step(a: int, b: int, n: int) -> tuple[int, int]:
    """One channel application on a basis state: (a,b) -> (b, a mod b).

    States with b = 0 are the fixed points, so iteration from a > b > 0
    terminates at (gcd(a, b), 0).
    """
    if not (0 <= a < n and 0 <= b < n):
        raise ShapeError(f"register values ({a}, {b}) overflow dimension {n}")
    if b == 0:
        return (a, 0)
    return (b, a % b)


def gcd_trace(a: int, b: int, n: int) -> list[tuple[int, int]]:
    """Iterate gcd_channel_step until the fixed point, inclusive of start."""
    trace = [(a, b)]
    while trace[-1][1] != 0:
        trace.append(gcd_channel_step(*trace[-1], n))
    return trace


def gcd_function(n: int) -> DiscreteFunction:
    """The Euclid step as a single function on the composite index a*n + b."""
    table = []
    for a in range(n):
        for b in range(n):
            a2, b2 = gcd_channel_step(a, b, n)
            table.append(a2 * n + b2)
    return DiscreteFunction(n * n, tuple(table))


def gcd_channel(n: int) -> GeneratedChannel:
    """Completely dephasing channel on A x B performing the Euclid step.

    Superposition inputs collapse to the classical mixture of stepped
    basis states, so iterating the channel runs the Euclidean algorithm on
    every branch of a diagonal mixture at once.
    """
    return full_dephasing_family(gcd_function(n))


def modulo_oracle_unitary(n: int) -> np.ndarray:
    """Three-register oracle |a>|b>|c> -> |a>|b>|c + (a mod b)>, additions mod n.

    For b = 0 the offset is a itself, which keeps the map a bijection.
    """
    if n < 1:
        raise DomainError(f"register dimension must be positive, got {n}")

    def image(idx: int) -> int:
        a, rest = divmod(idx, n * n)
        b, c = divmod(rest, n)
        offset = a % b if b != 0 else a
        return (a * n + b) * n + (c + offset) % n

    return permutation_matrix(n**3, image)


def _three_register_swap(n: int, first: int, second: int) -> np.ndarray:
    def image(idx: int) -> int:
        regs = [idx // (n * n), (idx // n) % n, idx % n]
        regs[first], regs[second] = regs[second], regs[first]
        return (regs[0] * n + regs[1]) * n + regs[2]

    return permutation_matrix(n**3, image)


def run_gcd_circuit(rho_ab: DensityOperator, n: int) -> DensityOperator:
    """Modulo oracle + two swaps + ancilla reset, traced back to two registers.

    Matches the gcd channel on every state supported on b != 0 basis
    states.  On b = 0 the literal wiring moves a into the second register
    instead of holding (a, 0) fixed, so fixed-point iteration uses
    gcd_channel / gcd_channel_step rather than this circuit.
    """
    if rho_ab.dim != n * n:
        raise ShapeError(f"input dim {rho_ab.dim} != n^2 = {n * n}")
    w = (
        _three_register_swap(n, 0, 1)
        @ _three_register_swap(n, 0, 2)
        @ modulo_oracle_unitary(n)
    )
    state = np.kron(rho_ab.matrix, ketbra(n, 0, 0))
    state = w @ state @ w.conj().T
    state = apply_to_matrix(_reset_last(n), state)
    return DensityOperator(partial_trace_b_of_three(state, n))


def _reset_last(n: int) -> KrausSet:
    """Kraus set resetting the last of three registers (viewed as (AB) x C)."""
    eye_ab = np.eye(n * n, dtype=complex)
    return KrausSet([np.kron(eye_ab, ketbra(n, 0, j)) for j in range(n)])


def partial_trace_b_of_three(m: np.ndarray, n: int) -> np.ndarray:
    """Trace the trailing n-dimensional register out of an n^3 operator."""
    return m.reshape(n * n, n, n * n, n).trace(axis1=1, axis2=3)
