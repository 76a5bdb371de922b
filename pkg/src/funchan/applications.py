"""Headline experiments: truncated-logistic sweeps, error-correction channels,
and the four-state coherent-subspace demonstration."""

from __future__ import annotations

import io
import statistics
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channels import DensityOperator, apply_to_matrix, ketbra
from .discrete import DiscreteFunction, analyze, logistic, truncate_map
from .errors import DataError, DomainError, GridError
from .families import DisjointSetFamily, GeneratedChannel, generate_kraus
from .liouville import channel_spectrum
from .parallel import ordered_map


@dataclass(frozen=True)
class BifurcationRecord:
    """Cycle data for one (mu, x0) pair of a truncated logistic sweep."""

    mu: Fraction
    x0: int
    period: int
    link_length: int
    cycle_points: tuple[int, ...]


@dataclass(frozen=True)
class IterateSample:
    """One settled iterate f^k(x0), stored as the exact dyadic value f^k/2^n."""

    mu: Fraction
    k: int
    value: Fraction


@dataclass(frozen=True)
class ScanResult:
    n_qubits: int
    records: tuple[BifurcationRecord, ...]
    iterates: tuple[IterateSample, ...]


def check_mu(mu: Fraction, n_qubits: int) -> Fraction:
    """Reject control values that do not sit on the dyadic grid."""
    mu = Fraction(mu)
    if (mu * 2**n_qubits).denominator != 1:
        raise GridError(f"mu = {mu} is not an integer multiple of 2^-{n_qubits}")
    if not (0 <= mu <= 4):
        raise GridError(f"mu = {mu} outside [0, 4]")
    return mu


def snap_mu(value: float | str | Fraction, n_qubits: int) -> tuple[Fraction, bool]:
    """Nearest representable p/2^n; the flag reports whether snapping moved it."""
    exact = Fraction(value)
    size = 2**n_qubits
    snapped = Fraction(round(exact * size), size)
    snapped = min(max(snapped, Fraction(0)), Fraction(4))
    return snapped, snapped == exact


def mu_grid(n_qubits: int, mu_min: Fraction, mu_max: Fraction) -> list[Fraction]:
    """All representable control values in [mu_min, mu_max]."""
    size = 2**n_qubits
    lo = check_mu(mu_min, n_qubits)
    hi = check_mu(mu_max, n_qubits)
    return [Fraction(p, size) for p in range(int(lo * size), int(hi * size) + 1)]


def bifurcation_scan(
    n_qubits: int,
    mu_values,
    x0_set,
    settle: int = 20,
    sample: int = 20,
) -> ScanResult:
    """Exact cycle analysis plus settled-iterate streams over a (mu, x0) grid.

    One record per (mu, x0) carries the period, link length and cycle of
    the orbit; the iterate stream holds f^k(x0)/2^n for
    k in [settle, settle + sample), the data behind the scatter diagrams.
    """
    if settle < 0 or sample < 0:
        raise DomainError("settle and sample must be non-negative")
    size = 2**n_qubits
    mus = [check_mu(mu, n_qubits) for mu in mu_values]
    starts = list(x0_set)
    for x0 in starts:
        if not (0 <= x0 < size):
            raise DomainError(f"start {x0} outside [0, {size})")

    def scan_one(mu: Fraction):
        f = truncate_map(logistic(mu), n_qubits)
        info = analyze(f)
        records = []
        iterates = []
        for x0 in starts:
            entry = f.iterate(x0, info.link_length_of[x0])
            cycle = next(c for c in info.cycles if entry in c)
            records.append(
                BifurcationRecord(
                    mu=mu,
                    x0=x0,
                    period=info.period_of[x0],
                    link_length=info.link_length_of[x0],
                    cycle_points=cycle,
                )
            )
            x = f.iterate(x0, settle)
            for k in range(settle, settle + sample):
                iterates.append(IterateSample(mu=mu, k=k, value=Fraction(x, size)))
                x = f.table[x]
        return records, iterates

    per_mu = ordered_map(scan_one, mus)
    records = tuple(rec for recs, _ in per_mu for rec in recs)
    iterates = tuple(sample_ for _, samples in per_mu for sample_ in samples)
    return ScanResult(n_qubits=n_qubits, records=records, iterates=iterates)


def median_period_curve(records) -> list[tuple[Fraction, int]]:
    """Per-mu lower median of the cycle period over the scanned starts."""
    buckets: dict[Fraction, list[int]] = {}
    order: list[Fraction] = []
    for rec in records:
        if rec.mu not in buckets:
            buckets[rec.mu] = []
            order.append(rec.mu)
        buckets[rec.mu].append(rec.period)
    if not buckets:
        raise DataError("no records to aggregate")
    return [(mu, int(statistics.median_low(buckets[mu]))) for mu in order]


def records_to_csv(records) -> str:
    """Delimited record dump: mu_num,mu_den,x0,period,link_length,cycle_points."""
    out = io.StringIO()
    out.write("mu_num,mu_den,x0,period,link_length,cycle_points\n")
    for rec in records:
        points = ";".join(str(p) for p in rec.cycle_points)
        out.write(
            f"{rec.mu.numerator},{rec.mu.denominator},{rec.x0},"
            f"{rec.period},{rec.link_length},{points}\n"
        )
    return out.getvalue()


def iterates_to_csv(iterates) -> str:
    """Delimited iterate stream: mu,k,value with value as a decimal."""
    out = io.StringIO()
    out.write("mu,k,value\n")
    for s in iterates:
        out.write(f"{float(s.mu)!r},{s.k},{float(s.value)!r}\n")
    return out.getvalue()


# --- three-bit bit-flip code channels ---------------------------------------

# States are 3-bit strings read msb-first; 000 and 111 are the codewords and
# each correctible error pairs a state with its bit-flipped complement.
_ECC_FAMILY = ((0, 7), (1, 6), (2, 5), (3, 4))

_ECC_TABLES = {
    # every single-flip state jumps straight to its codeword
    "simultaneous": (0, 0, 0, 7, 0, 7, 7, 7),
    # errors walk down a chain, one bit position per application:
    # 001 -> 010 -> 100 -> 000 and 110 -> 101 -> 011 -> 111
    "chain": (0, 2, 4, 7, 0, 3, 5, 7),
}


def ecc_bitflip_channel(variant: str) -> GeneratedChannel:
    """Three-bit bit-flip code correction as a generated channel on N = 8.

    The family groups each correctible error class {e, complement(e)} into
    one set, which is what lets a logical superposition a|000> + b|111>
    survive correction.  The simultaneous variant fixes any single flip in
    one application; the chain variant takes three.
    """
    key = variant.lower()
    if key not in _ECC_TABLES:
        raise DomainError(f"unknown variant {variant!r}; use simultaneous or chain")
    f = DiscreteFunction.from_table(_ECC_TABLES[key])
    family = DisjointSetFamily.from_sets(8, _ECC_FAMILY)
    return generate_kraus(f, family)


# --- four-state coherent-subspace demonstration ------------------------------


@dataclass(frozen=True)
class DemoCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class CoherentSubspaceReport:
    channel: GeneratedChannel
    asymptotic_dimension: int
    checks: tuple[DemoCheck, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _span_projector(mats) -> np.ndarray:
    stack = np.stack([np.asarray(m, dtype=complex).ravel() for m in mats], axis=1)
    q, _ = np.linalg.qr(stack)
    return q @ q.conj().T


def coherent_subspace_demo(
    trials: int = 100, seed: int = 7, tol: float = 1e-12
) -> CoherentSubspaceReport:
    """Build the four-state channel that is the identity on span{|0>,|1>}
    and funnels span{|2>,|3>} onto it coherently, then verify its spectrum.

    f = (0, 1, 0, 1) with family (0,1),(2,3): four eigenvalue-1 eigenvectors
    spanning the operator space of {|0>,|1>}, conserved pair-trace
    quantities, and tr(J Y) = tr(J E(Y)) = a + b for
    Y = a|3><2| + b|1><0| and J = |0><1| + |2><3|.
    """
    f = DiscreteFunction.from_table((0, 1, 0, 1))
    family = DisjointSetFamily.from_sets(4, ((2, 3), (0, 1)))
    channel = generate_kraus(f, family)
    report = channel_spectrum(channel.kraus)
    rng = np.random.default_rng(seed)
    checks: list[DemoCheck] = []

    def record(name: str, passed: bool, detail: str):
        checks.append(DemoCheck(name=name, passed=passed, detail=detail))

    record(
        "asymptotic_dimension",
        report.asymptotic_dimension == 4,
        f"got {report.asymptotic_dimension}, expected 4",
    )

    values = sorted(report.eigenvalues, key=abs, reverse=True)
    multiset_ok = (
        all(abs(v - 1) < 1e-9 for v in values[:4])
        and all(abs(v) < 1e-9 for v in values[4:])
    )
    record("eigenvalues", multiset_ok, "expected {1 x4, 0 x12}")

    unit_rights = [s for sp in report.unit_eigenspaces for s in sp.rights]
    expected_span = [ketbra(4, i, j) for i in (0, 1) for j in (0, 1)]
    dist = float(
        np.max(np.abs(_span_projector(unit_rights) - _span_projector(expected_span)))
    )
    record(
        "fixed_subspace",
        dist < 1e-8,
        f"projector distance {dist:.2e} to operator space of span{{|0>,|1>}}",
    )

    lefts = [s for sp in report.unit_eigenspaces for s in sp.lefts]
    proj_left = _span_projector(lefts)
    conserved_ok = True
    for expected in (
        ketbra(4, 0, 0) + ketbra(4, 2, 2),
        ketbra(4, 1, 1) + ketbra(4, 3, 3),
    ):
        v = expected.ravel()
        residual = float(np.linalg.norm(proj_left @ v - v) / np.linalg.norm(v))
        conserved_ok = conserved_ok and residual < 1e-8
    record("conserved_pair_traces", conserved_ok, "span includes |0><0|+|2><2| and |1><1|+|3><3|")

    j_op = ketbra(4, 0, 1) + ketbra(4, 2, 3)
    worst = 0.0
    for _ in range(trials):
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        y = a * ketbra(4, 3, 2) + b * ketbra(4, 1, 0)
        ey = apply_to_matrix(channel.kraus, y)
        t1 = np.trace(j_op @ y)
        t2 = np.trace(j_op @ ey)
        worst = max(worst, abs(t1 - (a + b)), abs(t2 - (a + b)))
    record("trace_identity", worst < tol, f"max |tr - (a+b)| = {worst:.2e} over {trials} draws")

    worst = 0.0
    for _ in range(trials):
        amps = np.zeros(4, dtype=complex)
        amps[2:] = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        rho = DensityOperator.pure(amps)
        once = apply_to_matrix(channel.kraus, rho.matrix)
        twice = apply_to_matrix(channel.kraus, once)
        worst = max(worst, float(np.max(np.abs(twice - once))))
    record("idempotent_on_funnel", worst < tol, f"max |E^2 - E| = {worst:.2e} on span{{|2>,|3>}}")

    return CoherentSubspaceReport(
        channel=channel,
        asymptotic_dimension=report.asymptotic_dimension,
        checks=tuple(checks),
    )
