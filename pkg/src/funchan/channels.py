"""Density operators, Kraus sets, and the elementary named channels.

All matrices are dense complex numpy arrays; target dimensions are small
(N <= 16, superoperators up to 256 x 256), so nothing here tries to be
sparse.  Validation tolerances are module constants and can be overridden
per call.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import DomainError, ShapeError, ValidationError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
COMPLETENESS_TOL = 1e-12
FLAG_TOL = 1e-10


def ket(n: int, i: int) -> np.ndarray:
    """Basis vector |i> in an n-dimensional space."""
    if not (0 <= i < n):
        raise DomainError(f"basis index {i} outside [0, {n})")
    v = np.zeros(n, dtype=complex)
    v[i] = 1.0
    return v


def ketbra(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit |i><j| in an n-dimensional space."""
    m = np.zeros((n, n), dtype=complex)
    m[i, j] = 1.0
    return m


def _as_square(matrix, name: str = "matrix") -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    return m


class DensityOperator:
    """A Hermitian, unit-trace, positive-semidefinite matrix.

    The three invariants are checked on construction; ``psd_tol`` is a
    small negative slack because repeated channel application accumulates
    rounding in the lowest eigenvalue.
    """

    __slots__ = ("dim", "matrix")

    def __init__(
        self,
        matrix,
        *,
        hermitian_tol: float = HERMITIAN_TOL,
        trace_tol: float = TRACE_TOL,
        psd_tol: float = PSD_TOL,
    ):
        m = _as_square(matrix, "density operator")
        herm_err = np.max(np.abs(m - m.conj().T))
        if herm_err > hermitian_tol:
            raise ValidationError(f"not Hermitian: max |M - M^dag| = {herm_err:.3e}")
        trace_err = abs(m.trace() - 1.0)
        if trace_err > trace_tol:
            raise ValidationError(f"trace differs from 1 by {trace_err:.3e}")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -psd_tol:
            raise ValidationError(f"not PSD: minimum eigenvalue {min_eig:.3e}")
        self.dim = m.shape[0]
        self.matrix = m

    @classmethod
    def pure(cls, amplitudes) -> "DensityOperator":
        """|psi><psi| for the given amplitude vector (normalized first)."""
        v = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(v)
        if norm == 0:
            raise DomainError("cannot build a state from the zero vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def basis_state(cls, n: int, i: int) -> "DensityOperator":
        return cls(ketbra(n, i, i))

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        return cls(np.eye(n, dtype=complex) / n)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"


class KrausSet:
    """An ordered list of same-shaped operators with sum K^dag K = I."""

    __slots__ = ("dim", "operators")

    def __init__(self, operators, *, completeness_tol: float = COMPLETENESS_TOL):
        ops = tuple(_as_square(k, "Kraus operator") for k in operators)
        if not ops:
            raise ValidationError("a Kraus set needs at least one operator")
        dim = ops[0].shape[0]
        if any(k.shape != (dim, dim) for k in ops):
            raise ShapeError("Kraus operators have mixed dimensions")
        total = sum(k.conj().T @ k for k in ops)
        err = np.max(np.abs(total - np.eye(dim)))
        if err > completeness_tol:
            raise ValidationError(
                f"completeness violated: max |sum K^dag K - I| = {err:.3e}"
            )
        self.dim = dim
        self.operators = ops

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __repr__(self):
        return f"KrausSet(dim={self.dim}, rank={len(self.operators)})"


def apply_to_matrix(k: KrausSet, x) -> np.ndarray:
    """Linear channel action sum_i K_i X K_i^dag on an arbitrary operator."""
    x = _as_square(x)
    if x.shape != (k.dim, k.dim):
        raise ShapeError(f"operator dim {x.shape[0]} != channel dim {k.dim}")
    out = np.zeros_like(x)
    for op in k.operators:
        out += op @ x @ op.conj().T
    return out


def apply_channel(k: KrausSet, rho: DensityOperator, **tolerances) -> DensityOperator:
    """Apply the channel to a density operator; the output is re-validated."""
    if rho.dim != k.dim:
        raise ShapeError(f"state dim {rho.dim} != channel dim {k.dim}")
    return DensityOperator(apply_to_matrix(k, rho.matrix), **tolerances)


def apply_adjoint(k: KrausSet, x) -> np.ndarray:
    """Adjoint channel action sum_i K_i^dag X K_i (the Heisenberg picture)."""
    x = _as_square(x)
    if x.shape != (k.dim, k.dim):
        raise ShapeError(f"operator dim {x.shape[0]} != channel dim {k.dim}")
    out = np.zeros_like(x)
    for op in k.operators:
        out += op.conj().T @ x @ op
    return out


def dephasing_set(n: int) -> KrausSet:
    """The N projectors |i><i|; kills every off-diagonal matrix element."""
    if n < 1:
        raise DomainError(f"dimension must be positive, got {n}")
    return KrausSet([ketbra(n, i, i) for i in range(n)])


def reset_set_bipartite(dim_a: int, dim_b: int) -> KrausSet:
    """Kraus set on A x B that re-initializes A to |0> and keeps the B marginal.

    K_j = |0><j|_A tensor I_B.  The output is always the product state
    |0><0|_A tensor tr_A(rho), so the channel is entanglement breaking.
    """
    if dim_a < 1 or dim_b < 1:
        raise DomainError("subsystem dimensions must be positive")
    eye_b = np.eye(dim_b, dtype=complex)
    return KrausSet([np.kron(ketbra(dim_a, 0, j), eye_b) for j in range(dim_a)])


def partial_trace_a_matrix(m, dim_a: int, dim_b: int) -> np.ndarray:
    """tr_A of an operator on A x B (composite index a*dim_b + b)."""
    m = _as_square(m)
    if m.shape[0] != dim_a * dim_b:
        raise ShapeError(
            f"operator dim {m.shape[0]} != dim_a*dim_b = {dim_a * dim_b}"
        )
    return m.reshape(dim_a, dim_b, dim_a, dim_b).trace(axis1=0, axis2=2)


def partial_trace_b_matrix(m, dim_a: int, dim_b: int) -> np.ndarray:
    """tr_B of an operator on A x B."""
    m = _as_square(m)
    if m.shape[0] != dim_a * dim_b:
        raise ShapeError(
            f"operator dim {m.shape[0]} != dim_a*dim_b = {dim_a * dim_b}"
        )
    return m.reshape(dim_a, dim_b, dim_a, dim_b).trace(axis1=1, axis2=3)


def partial_trace_a(rho_ab: DensityOperator, dim_a: int, dim_b: int) -> DensityOperator:
    """B marginal of a bipartite state; the trace is preserved."""
    return DensityOperator(partial_trace_a_matrix(rho_ab.matrix, dim_a, dim_b))


def partial_trace_b(rho_ab: DensityOperator, dim_a: int, dim_b: int) -> DensityOperator:
    """A marginal of a bipartite state."""
    return DensityOperator(partial_trace_b_matrix(rho_ab.matrix, dim_a, dim_b))


def channel_flags(k: KrausSet, tol: float = FLAG_TOL) -> dict:
    """Whether the channel is unital (fixes I) and/or dephasing.

    Dephasing means composing with the full dephasing channel changes
    nothing, i.e. the image of every matrix unit is already diagonal.
    """
    eye = np.eye(k.dim, dtype=complex)
    unital = bool(np.max(np.abs(apply_to_matrix(k, eye) - eye)) <= tol)
    off = ~np.eye(k.dim, dtype=bool)
    dephasing = True
    for i in range(k.dim):
        for j in range(k.dim):
            image = apply_to_matrix(k, ketbra(k.dim, i, j))
            if np.max(np.abs(image[off])) > tol:
                dephasing = False
                break
        if not dephasing:
            break
    return {"unital": unital, "dephasing": dephasing}


def random_density(n: int, rng: np.random.Generator) -> DensityOperator:
    """A Ginibre-distributed full-rank random density operator."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    m = g @ g.conj().T
    return DensityOperator(m / m.trace())


def matrix_to_json(m) -> dict:
    """Serialize a square matrix as {dim, re, im} with row-major lists."""
    m = _as_square(m)
    return {
        "dim": m.shape[0],
        "re": [float(v) for v in m.real.ravel()],
        "im": [float(v) for v in m.imag.ravel()],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Inverse of matrix_to_json."""
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if re.size != dim * dim or im.size != dim * dim:
        raise ValidationError(
            f"matrix object claims dim {dim} but carries {re.size} entries"
        )
    return (re + 1j * im).reshape(dim, dim)


def load_density(path: str) -> DensityOperator:
    """Read a density operator from a JSON matrix file."""
    with open(path, encoding="utf-8") as fh:
        return DensityOperator(matrix_from_json(json.load(fh)))
