import math
import os
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from funchan.applications import (
    BifurcationRecord,
    bifurcation_scan,
    coherent_subspace_demo,
    ecc_bitflip_channel,
    iterates_to_csv,
    median_period_curve,
    mu_grid,
    records_to_csv,
    snap_mu,
)
from funchan.channels import DensityOperator, apply_channel, ketbra
from funchan.discrete import DiscreteFunction, logistic, truncate_map
from funchan.errors import DataError, DomainError, GridError


class TestGrid:
    def test_mu_grid_endpoints(self):
        grid = mu_grid(3, Fraction(0), Fraction(4))
        assert grid[0] == 0 and grid[-1] == 4
        assert len(grid) == 33

    def test_check_rejects_off_grid(self):
        with pytest.raises(GridError):
            mu_grid(3, Fraction(1, 3), Fraction(2))

    def test_snap(self):
        snapped, exact = snap_mu("3.45", 7)
        assert not exact
        assert snapped == Fraction(442, 128)
        snapped, exact = snap_mu("3.25", 4)
        assert exact and snapped == Fraction(13, 4)


class TestBifurcationScan:
    def test_small_mu_collapses_to_zero(self):
        result = bifurcation_scan(6, [Fraction(1, 2)], [32], settle=10, sample=5)
        (record,) = result.records
        assert record.period == 1
        assert record.cycle_points == (0,)

    def test_iterate_stream_window(self):
        result = bifurcation_scan(6, [Fraction(7, 2)], [32], settle=20, sample=20)
        ks = [s.k for s in result.iterates]
        assert ks == list(range(20, 40))
        f = truncate_map(logistic(Fraction(7, 2)), 6)
        assert result.iterates[0].value == Fraction(f.iterate(32, 20), 64)

    def test_record_orbit_consistency(self):
        result = bifurcation_scan(
            5, mu_grid(5, Fraction(3), Fraction(4)), range(32), settle=0, sample=0
        )
        for rec in result.records:
            f = truncate_map(logistic(rec.mu), 5)
            assert f.iterate(rec.x0, rec.link_length + rec.period) == f.iterate(
                rec.x0, rec.link_length
            )

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            bifurcation_scan(4, [Fraction(1)], [99])
        with pytest.raises(DomainError):
            bifurcation_scan(4, [Fraction(1)], [0], settle=-1)

    def test_reproducible_across_thread_counts(self):
        script = (
            "from funchan.applications import bifurcation_scan, records_to_csv, mu_grid\n"
            "from fractions import Fraction\n"
            "r = bifurcation_scan(5, mu_grid(5, Fraction(2), Fraction(4)), range(32), 5, 5)\n"
            "import sys; sys.stdout.write(records_to_csv(r.records))\n"
        )
        outputs = []
        for threads in ("1", "4"):
            env = dict(os.environ, FUNCHAN_THREADS=threads)
            proc = subprocess.run(
                [sys.executable, "-c", script], capture_output=True, text=True, env=env
            )
            assert proc.returncode == 0
            outputs.append(proc.stdout)
        assert outputs[0] == outputs[1]


class TestMedianCurve:
    def test_single_bucket(self):
        rec = BifurcationRecord(Fraction(1, 2), 3, period=4, link_length=1, cycle_points=(1, 2, 3, 4))
        assert median_period_curve([rec]) == [(Fraction(1, 2), 4)]

    def test_low_mu_median_one(self):
        grid = [mu for mu in mu_grid(5, Fraction(0), Fraction(1)) if mu < 1]
        result = bifurcation_scan(5, grid, range(32), settle=0, sample=0)
        curve = median_period_curve(result.records)
        assert all(median == 1 for _, median in curve)

    def test_lower_median_convention(self):
        records = [
            BifurcationRecord(Fraction(1), x0, period=p, link_length=0, cycle_points=(0,) * p)
            for x0, p in enumerate((1, 2, 2, 4))
        ]
        assert median_period_curve(records) == [(Fraction(1), 2)]

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            median_period_curve([])


class TestCsvFormats:
    def test_records_csv_shape(self):
        result = bifurcation_scan(4, [Fraction(3)], [8], settle=0, sample=0)
        text = records_to_csv(result.records)
        lines = text.strip().split("\n")
        assert lines[0] == "mu_num,mu_den,x0,period,link_length,cycle_points"
        assert lines[1].startswith("3,1,8,")

    def test_iterates_csv_shape(self):
        result = bifurcation_scan(4, [Fraction(3)], [8], settle=2, sample=2)
        lines = iterates_to_csv(result.iterates).strip().split("\n")
        assert lines[0] == "mu,k,value"
        assert len(lines) == 3


class TestEccChannels:
    def codeword_superposition(self, a, b, flip=None):
        amps = np.zeros(8, dtype=complex)
        zero, one = 0, 7
        if flip is not None:
            zero ^= 1 << (2 - flip)
            one ^= 1 << (2 - flip)
        amps[zero], amps[one] = a, b
        return DensityOperator.pure(amps)

    def logical_target(self, a, b):
        return self.codeword_superposition(a, b).matrix

    def test_codewords_fixed(self):
        for variant in ("simultaneous", "chain"):
            kraus = ecc_bitflip_channel(variant).kraus
            rho = DensityOperator.basis_state(8, 0)
            assert np.allclose(apply_channel(kraus, rho).matrix, rho.matrix)

    def test_simultaneous_corrects_every_flip_in_one_step(self, rng):
        kraus = ecc_bitflip_channel("simultaneous").kraus
        for flip in (0, 1, 2):
            a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            rho = self.codeword_superposition(a, b, flip=flip)
            out = apply_channel(kraus, rho)
            assert np.max(np.abs(out.matrix - self.logical_target(a, b))) < 1e-12

    def test_chain_needs_exactly_three(self, rng):
        kraus = ecc_bitflip_channel("chain").kraus
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        state = self.codeword_superposition(a, b, flip=2)  # 001 / 110 pair
        target = self.logical_target(a, b)
        for step in range(1, 4):
            state = apply_channel(kraus, state)
            done = np.max(np.abs(state.matrix - target)) < 1e-12
            assert done == (step == 3)

    def test_chain_single_step_fixes_adjacent_errors(self):
        # only the states one application away (100 and 011) are corrected
        kraus = ecc_bitflip_channel("chain").kraus
        for state_index in range(1, 7):
            rho = DensityOperator.basis_state(8, state_index)
            out = apply_channel(kraus, rho)
            corrected = out.matrix[0, 0] + out.matrix[7, 7]
            assert (abs(corrected - 1) < 1e-12) == (state_index in (4, 3))

    def test_unknown_variant(self):
        with pytest.raises(DomainError):
            ecc_bitflip_channel("bogus")


class TestCoherentSubspaceDemo:
    def test_all_checks_pass(self):
        report = coherent_subspace_demo()
        assert report.asymptotic_dimension == 4
        failed = [c for c in report.checks if not c.passed]
        assert not failed, failed

    def test_trace_identity_directly(self):
        demo = coherent_subspace_demo(trials=1)
        kraus = demo.channel.kraus
        from funchan.channels import apply_to_matrix

        a, b = 0.3 - 0.2j, 1.1 + 0.4j
        y = a * ketbra(4, 3, 2) + b * ketbra(4, 1, 0)
        j = ketbra(4, 0, 1) + ketbra(4, 2, 3)
        assert np.trace(j @ y) == pytest.approx(a + b)
        assert np.trace(j @ apply_to_matrix(kraus, y)) == pytest.approx(a + b)
