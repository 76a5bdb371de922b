"""Matrix representation of a channel on vectorized operators, and its spectrum.

Operators are vectorized row-major (the unit |i><j| sits at index i*N + j),
so the channel matrix is L = sum_i kron(K_i, conj(K_i)) and L[a, b] equals
tr(F_a^dag E(F_b)) for matrix units F.  L is not normal in general: the
spectrum is computed from a complex Schur form, eigenspaces are recovered
as null spaces at the exactly known candidate eigenvalues, and the Jordan
structure at zero from the ranks of powers of L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channels import KrausSet, apply_to_matrix
from .errors import ShapeError, SpectralAnomalyError

ZERO_TOL = 1e-9  # |lambda| below this is classified as zero
UNIT_TOL = 1e-9  # | |lambda| - 1 | below this is a unit-modulus candidate
ROOT_TOL = 1e-8  # |lambda^d - 1| below this identifies the root order
NULLSPACE_RCOND = 1e-10
FLAG_TOL = 1e-10


def vec(m: np.ndarray) -> np.ndarray:
    """Row-major vectorization of a square matrix."""
    return np.asarray(m, dtype=complex).ravel()


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of vec for an n x n matrix."""
    return np.asarray(v, dtype=complex).reshape(n, n)


@dataclass(frozen=True)
class LiouvilleMatrix:
    """The N^2 x N^2 matrix acting on vectorized operators."""

    n: int
    matrix: np.ndarray


@dataclass(frozen=True)
class Classification:
    """Either "zero" or "root_of_unity" with the minimal order d."""

    kind: str
    order: int | None = None


@dataclass(frozen=True)
class ReportFlags:
    unital: bool
    dephasing: bool
    ergodic: bool
    mixing: bool


@dataclass(frozen=True)
class UnitEigenspace:
    """One unit-modulus eigenvalue with its full (semisimple) eigenspace.

    ``rights`` are Frobenius-orthonormal N x N operators; ``lefts`` are
    scaled so that tr(lefts[a]^dag rights[b]) = delta_ab.
    """

    value: complex
    order: int
    rights: tuple[np.ndarray, ...]
    lefts: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class SpectralReport:
    """Spectrum of a channel matrix with classification and eigenspaces.

    Eigenvalues are sorted by descending modulus, then ascending phase in
    [0, 2pi).  ``right_eigenvectors``/``left_eigenvectors`` align with
    ``eigenvalues``; zero entries beyond the geometric multiplicity are
    None (those directions exist only as Jordan chains, summarized in
    ``zero_jordan_chain_lengths``).
    """

    n: int
    eigenvalues: tuple[complex, ...]
    classifications: tuple[Classification, ...]
    right_eigenvectors: tuple
    left_eigenvectors: tuple
    zero_jordan_chain_lengths: tuple[int, ...]
    asymptotic_dimension: int
    flags: ReportFlags
    unit_eigenspaces: tuple[UnitEigenspace, ...]

    @property
    def zero_count(self) -> int:
        return sum(1 for c in self.classifications if c.kind == "zero")

    def generalized_eigenvector_count(self) -> int:
        """Zero directions with no true eigenvector: algebraic - geometric."""
        return sum(length - 1 for length in self.zero_jordan_chain_lengths)


def build_liouville(k: KrausSet) -> LiouvilleMatrix:
    """Channel matrix in the row-major unit basis."""
    dim = k.dim
    total = np.zeros((dim * dim, dim * dim), dtype=complex)
    for op in k.operators:
        total += np.kron(op, op.conj())
    return LiouvilleMatrix(n=dim, matrix=total)


def liouville_entry(k: KrausSet, alpha: int, beta: int) -> complex:
    """tr(F_alpha^dag E(F_beta)) computed from the definition; test oracle."""
    n = k.dim
    f_beta = np.zeros((n, n), dtype=complex)
    f_beta[beta // n, beta % n] = 1.0
    image = apply_to_matrix(k, f_beta)
    return complex(image[alpha // n, alpha % n])


def _classify(value: complex, n: int) -> Classification:
    if abs(value) < ZERO_TOL:
        return Classification("zero")
    if abs(abs(value) - 1.0) < UNIT_TOL:
        # Cycle periods cannot exceed N, but search a little beyond as a
        # guard against numerical drift in the phase.
        for d in range(1, n * n + 1):
            if abs(value**d - 1.0) < ROOT_TOL:
                return Classification("root_of_unity", d)
    raise SpectralAnomalyError(value)


def _null_space(m: np.ndarray) -> np.ndarray:
    return scipy.linalg.null_space(m, rcond=NULLSPACE_RCOND)


def _sort_key(value: complex):
    phase = math.atan2(value.imag, value.real) % (2 * math.pi)
    return (-round(abs(value), 9), round(phase, 9))


def zero_jordan_structure(l: LiouvilleMatrix) -> tuple[int, ...]:
    """Multiset of Jordan chain lengths at eigenvalue zero, descending.

    rank(L^(k-1)) - rank(L^k) counts the chains of length >= k; the ranks
    stabilize once every chain is exhausted.
    """
    dim = l.matrix.shape[0]
    ranks = [dim]
    power = np.eye(dim, dtype=complex)
    while True:
        power = power @ l.matrix
        smax = float(np.max(np.abs(power))) if power.size else 0.0
        tol = 1e-8 * max(1.0, smax)
        ranks.append(int(np.linalg.matrix_rank(power, tol=tol)))
        if ranks[-1] == ranks[-2]:
            break
    chains_ge = [ranks[k] - ranks[k + 1] for k in range(len(ranks) - 1)]
    chains_ge.append(0)
    lengths: list[int] = []
    for k in range(len(chains_ge) - 1):
        lengths.extend([k + 1] * (chains_ge[k] - chains_ge[k + 1]))
    return tuple(sorted(lengths, reverse=True))


def _flags_from_matrix(l: LiouvilleMatrix, unit_spaces) -> ReportFlags:
    n, m = l.n, l.matrix
    eye_vec = vec(np.eye(n, dtype=complex))
    unital = bool(np.max(np.abs(m @ eye_vec - eye_vec)) <= FLAG_TOL)
    off_rows = [i * n + j for i in range(n) for j in range(n) if i != j]
    dephasing = bool(np.max(np.abs(m[off_rows, :])) <= FLAG_TOL) if off_rows else True
    fixed = [s for s in unit_spaces if abs(s.value - 1.0) < ROOT_TOL]
    ergodic = bool(fixed) and len(fixed[0].rights) == 1
    asymptotic = sum(len(s.rights) for s in unit_spaces)
    mixing = ergodic and asymptotic == 1
    return ReportFlags(unital=unital, dephasing=dephasing, ergodic=ergodic, mixing=mixing)


def spectrum(l: LiouvilleMatrix) -> SpectralReport:
    """Classify every eigenvalue and extract the unit-modulus eigenspaces.

    Unit-modulus eigenvalues of these channels are semisimple, so each
    eigenspace is the null space of L - lambda I at the exact root of
    unity; a geometric/algebraic mismatch raises SpectralAnomalyError, as
    does any eigenvalue that is neither ~0 nor ~unit modulus.
    """
    n = l.n
    m = l.matrix
    raw = np.linalg.eigvals(m)
    classified = [(value, _classify(value, n)) for value in raw]
    classified.sort(key=lambda pair: _sort_key(pair[0]))

    # Group unit-modulus eigenvalues by the exact root of unity they match.
    groups: dict[tuple[int, int], list[int]] = {}
    for idx, (value, cls) in enumerate(classified):
        if cls.kind != "root_of_unity":
            continue
        d = cls.order
        k = round(math.atan2(value.imag, value.real) * d / (2 * math.pi)) % d
        groups.setdefault((k, d), []).append(idx)

    unit_spaces = []
    right_by_index: dict[int, np.ndarray] = {}
    left_by_index: dict[int, np.ndarray] = {}
    for (k, d), indices in sorted(groups.items(), key=lambda kv: kv[0][0] / kv[0][1]):
        exact = np.exp(2j * np.pi * k / d)
        basis = _null_space(m - exact * np.eye(m.shape[0]))
        if basis.shape[1] != len(indices):
            raise SpectralAnomalyError(
                exact,
                f"eigenvalue {exact:.6f}: geometric multiplicity {basis.shape[1]} "
                f"!= algebraic {len(indices)}",
            )
        left_basis = _null_space(m.conj().T - np.conj(exact) * np.eye(m.shape[0]))
        overlap = left_basis.conj().T @ basis
        lefts = left_basis @ np.linalg.inv(overlap).conj().T
        rights_ops = tuple(unvec(basis[:, i], n) for i in range(basis.shape[1]))
        lefts_ops = tuple(unvec(lefts[:, i], n) for i in range(lefts.shape[1]))
        unit_spaces.append(
            UnitEigenspace(value=complex(exact), order=d, rights=rights_ops, lefts=lefts_ops)
        )
        for slot, idx in enumerate(indices):
            right_by_index[idx] = rights_ops[slot]
            left_by_index[idx] = lefts_ops[slot]

    zero_indices = [i for i, (_, c) in enumerate(classified) if c.kind == "zero"]
    if zero_indices:
        zero_rights = _null_space(m)
        zero_lefts = _null_space(m.conj().T)
        for slot, idx in enumerate(zero_indices):
            if slot < zero_rights.shape[1]:
                right_by_index[idx] = unvec(zero_rights[:, slot], n)
            if slot < zero_lefts.shape[1]:
                left_by_index[idx] = unvec(zero_lefts[:, slot], n)

    chains = zero_jordan_structure(l) if zero_indices else ()
    if sum(chains) != len(zero_indices):
        raise SpectralAnomalyError(
            0.0,
            f"zero multiplicity mismatch: chains sum to {sum(chains)}, "
            f"eigenvalue count is {len(zero_indices)}",
        )

    flags = _flags_from_matrix(l, unit_spaces)
    eigenvalues = tuple(complex(v) for v, _ in classified)
    return SpectralReport(
        n=n,
        eigenvalues=eigenvalues,
        classifications=tuple(c for _, c in classified),
        right_eigenvectors=tuple(right_by_index.get(i) for i in range(len(classified))),
        left_eigenvectors=tuple(left_by_index.get(i) for i in range(len(classified))),
        zero_jordan_chain_lengths=chains,
        asymptotic_dimension=len(classified) - len(zero_indices),
        flags=flags,
        unit_eigenspaces=tuple(unit_spaces),
    )


def channel_spectrum(k: KrausSet) -> SpectralReport:
    """Convenience: Liouville matrix plus spectrum in one step."""
    return spectrum(build_liouville(k))


def conserved_quantities(report: SpectralReport) -> list[np.ndarray]:
    """Left eigenvectors at unit-modulus eigenvalues.

    Each returned J satisfies tr(J rho) = lambda tr(J E(rho)) for every
    density operator rho, so its expectation survives iteration up to the
    eigenvalue's phase.
    """
    out: list[np.ndarray] = []
    for space in report.unit_eigenspaces:
        out.extend(space.lefts)
    return out


def ergodic_mixing_flags(report: SpectralReport) -> dict:
    """Unique fixed point (ergodic); additionally no other surviving phase
    (mixing)."""
    return {"ergodic": report.flags.ergodic, "mixing": report.flags.mixing}


def report_to_json(report: SpectralReport, include_eigenvectors: bool = False) -> dict:
    """JSON form of a report; eigenvector dumps are opt-in."""
    entries = []
    for value, cls in zip(report.eigenvalues, report.classifications):
        entries.append(
            {
                "re": round(value.real, 12),
                "im": round(value.imag, 12),
                "class": cls.kind,
                "order": cls.order,
            }
        )
    obj = {
        "dim": report.n,
        "eigenvalues": entries,
        "flags": {
            "unital": report.flags.unital,
            "dephasing": report.flags.dephasing,
            "ergodic": report.flags.ergodic,
            "mixing": report.flags.mixing,
        },
        "zero_chain_lengths": list(report.zero_jordan_chain_lengths),
        "asymptotic_dimension": report.asymptotic_dimension,
    }
    if include_eigenvectors:
        from .channels import matrix_to_json

        obj["right_eigenvectors"] = [
            None if v is None else matrix_to_json(v) for v in report.right_eigenvectors
        ]
        obj["left_eigenvectors"] = [
            None if v is None else matrix_to_json(v) for v in report.left_eigenvectors
        ]
    return obj
