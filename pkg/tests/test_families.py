import itertools

import numpy as np
import pytest

from funchan.channels import DensityOperator, apply_to_matrix, channel_flags, ketbra
from funchan.discrete import DiscreteFunction
from funchan.errors import CapabilityError, DomainError, ShapeError, ValidationError
from funchan.families import (
    DisjointSetFamily,
    all_functions,
    cycle_eigenvectors,
    cycle_fixed_point,
    enumerate_valid_families,
    full_dephasing_family,
    generate_kraus,
    min_kraus_rank,
    validate_family,
)
from funchan.liouville import build_liouville, zero_jordan_structure

F4 = DiscreteFunction.from_table([0, 1, 0, 1])
FAM4 = DisjointSetFamily.from_sets(4, [(2, 3), (0, 1)])


class TestFamilyType:
    def test_canonical_ordering(self):
        fam = DisjointSetFamily.from_sets(4, [(3, 2), (1, 0)])
        assert fam.sets == ((0, 1), (2, 3))

    def test_rejects_overlap(self):
        with pytest.raises(ValidationError, match="overlap"):
            DisjointSetFamily.from_sets(3, [(0, 1), (1, 2)])

    def test_rejects_non_cover(self):
        with pytest.raises(ValidationError, match="missing"):
            DisjointSetFamily.from_sets(3, [(0, 1)])

    def test_parse_and_format(self):
        fam = DisjointSetFamily.parse(" (2, 3)(0,1) ", 4)
        assert fam == FAM4
        assert str(fam) == "(0,1)(2,3)"

    def test_parse_garbage(self):
        with pytest.raises(ValidationError):
            DisjointSetFamily.parse("0,1)(2", 3)
        with pytest.raises(ValidationError):
            DisjointSetFamily.parse("(0,x)", 2)


class TestValidateFamily:
    def test_paired_fixed_points_and_sources(self):
        assert validate_family(F4, FAM4) is True

    def test_colliding_pairs(self):
        fam = DisjointSetFamily.from_sets(4, [(0, 2), (1, 3)])
        assert validate_family(F4, fam) is False

    def test_singletons_always_valid(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 7))
            table = tuple(int(v) for v in rng.integers(0, n, size=n))
            f = DiscreteFunction(n, table)
            assert validate_family(f, DisjointSetFamily.singletons(n))

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            validate_family(DiscreteFunction.identity(3), FAM4)


class TestGenerateKraus:
    def test_identity_single_set(self):
        ch = generate_kraus(DiscreteFunction.identity(2), DisjointSetFamily.whole(2))
        assert len(ch.kraus) == 1
        assert np.array_equal(ch.kraus.operators[0], np.eye(2))

    def test_swap_singletons(self):
        ch = generate_kraus(
            DiscreteFunction.from_table([1, 0]), DisjointSetFamily.singletons(2)
        )
        assert np.array_equal(ch.kraus.operators[0], ketbra(2, 1, 0))
        assert np.array_equal(ch.kraus.operators[1], ketbra(2, 0, 1))

    def test_four_state_pair(self):
        ch = generate_kraus(F4, FAM4)
        k_fixed = ketbra(4, 0, 0) + ketbra(4, 1, 1)
        k_funnel = ketbra(4, 0, 2) + ketbra(4, 1, 3)
        # canonical order puts (0,1) first
        assert np.array_equal(ch.kraus.operators[0], k_fixed)
        assert np.array_equal(ch.kraus.operators[1], k_funnel)

    def test_invalid_family_names_offender(self):
        fam = DisjointSetFamily.from_sets(4, [(0, 2), (1, 3)])
        with pytest.raises(ValidationError, match=r"\(0, 2\)"):
            generate_kraus(F4, fam)

    def test_completeness_exact(self):
        ch = generate_kraus(F4, FAM4)
        total = sum(k.conj().T @ k for k in ch.kraus.operators)
        assert np.array_equal(total, np.eye(4))


class TestFullDephasing:
    def test_identity_gives_projectors(self):
        ch = full_dephasing_family(DiscreteFunction.identity(3))
        assert [np.argmax(k) for k in ch.kraus.operators] == [0, 4, 8]

    def test_constant_three_states(self):
        ch = full_dephasing_family(DiscreteFunction.constant(3, 1))
        expected = [ketbra(3, 1, 0), ketbra(3, 1, 1), ketbra(3, 1, 2)]
        for op, want in zip(ch.kraus.operators, expected):
            assert np.array_equal(op, want)

    def test_off_diagonals_killed(self, rng):
        table = tuple(int(v) for v in rng.integers(0, 4, size=4))
        ch = full_dephasing_family(DiscreteFunction(4, table))
        for i, j in itertools.permutations(range(4), 2):
            assert np.allclose(apply_to_matrix(ch.kraus, ketbra(4, i, j)), 0)


class TestMinKrausRank:
    def test_bijective(self):
        assert min_kraus_rank(DiscreteFunction.from_table([1, 2, 0])) == 1

    def test_constant(self):
        assert min_kraus_rank(DiscreteFunction.constant(3, 0)) == 3

    def test_four_state_formula_value(self):
        # formula value; the published example family achieves rank 2
        assert min_kraus_rank(F4) == 3


class TestEnumerateFamilies:
    def test_identity_two_states(self):
        fams = enumerate_valid_families(DiscreteFunction.identity(2))
        assert [fam.sets for fam in fams] == [((0, 1),), ((0,), (1,))]

    def test_three_state_two_cycle_rank_two(self):
        f = DiscreteFunction.from_table([1, 0, 1])
        fams = enumerate_valid_families(f, max_rank=2)
        assert {fam.sets for fam in fams} == {((0, 1), (2,)), ((0,), (1, 2))}

    def test_constant_two_states(self):
        fams = enumerate_valid_families(DiscreteFunction.constant(2, 1))
        assert [fam.sets for fam in fams] == [((0,), (1,))]

    def test_size_cap(self):
        with pytest.raises(CapabilityError):
            enumerate_valid_families(DiscreteFunction.identity(9))

    def test_all_families_valid_and_bounded(self):
        f = DiscreteFunction.from_table([1, 2, 0, 0])
        for fam in enumerate_valid_families(f, max_rank=3):
            assert fam.rank <= 3
            assert validate_family(f, fam)


class TestCycleOperators:
    def test_fixed_point(self):
        f = DiscreteFunction.from_table([0, 0])
        rho = cycle_fixed_point(f, 0)
        assert np.allclose(rho.matrix, ketbra(2, 0, 0))

    def test_two_cycle_mixture(self):
        f = DiscreteFunction.from_table([1, 0])
        rho = cycle_fixed_point(f, 1)
        assert np.allclose(rho.matrix, np.eye(2) / 2)

    def test_three_cycle_mixture(self):
        f = DiscreteFunction.from_table([1, 2, 0])
        rho = cycle_fixed_point(f, 2)
        assert np.allclose(rho.matrix, np.eye(3) / 3)

    def test_fixed_under_every_valid_channel(self):
        f = DiscreteFunction.from_table([1, 0, 0])
        rho = cycle_fixed_point(f, 0)
        for fam in enumerate_valid_families(f):
            ch = generate_kraus(f, fam)
            assert np.allclose(apply_to_matrix(ch.kraus, rho.matrix), rho.matrix, atol=1e-12)

    def test_off_cycle_rejected(self):
        f = DiscreteFunction.from_table([1, 0, 0])
        with pytest.raises(DomainError):
            cycle_fixed_point(f, 2)

    def test_trivial_cycle_eigenvectors(self):
        f = DiscreteFunction.from_table([0, 0])
        pairs = cycle_eigenvectors(f, 0)
        assert len(pairs) == 1
        value, op = pairs[0]
        assert value == 1
        assert np.allclose(op, ketbra(2, 0, 0))

    def test_two_cycle_eigenvectors(self):
        f = DiscreteFunction.from_table([1, 0])
        pairs = cycle_eigenvectors(f, 0)
        values = [v for v, _ in pairs]
        assert values[0] == pytest.approx(1)
        assert values[1] == pytest.approx(-1)
        assert np.allclose(pairs[1][1], (ketbra(2, 0, 0) - ketbra(2, 1, 1)) / 2)

    def test_three_cycle_eigenvalue_order(self):
        f = DiscreteFunction.from_table([1, 2, 0])
        values = [v for v, _ in cycle_eigenvectors(f, 0)]
        omega = np.exp(2j * np.pi / 3)
        assert values[0] == pytest.approx(1)
        assert values[1] == pytest.approx(omega**2)
        assert values[2] == pytest.approx(omega)

    def test_eigen_relation_under_every_channel(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 6))
            table = tuple(int(v) for v in rng.integers(0, n, size=n))
            f = DiscreteFunction(n, table)
            from funchan.discrete import analyze

            cycle = analyze(f).cycles[0]
            for fam in enumerate_valid_families(f):
                ch = generate_kraus(f, fam)
                for value, op in cycle_eigenvectors(f, cycle[0]):
                    image = apply_to_matrix(ch.kraus, op)
                    assert np.max(np.abs(image - value * op)) < 1e-10


class TestStructuralProperties:
    def test_rank_n_channels_dephase(self, rng):
        # singleton families always give a dephasing channel
        for _ in range(20):
            n = int(rng.integers(2, 7))
            table = tuple(int(v) for v in rng.integers(0, n, size=n))
            ch = full_dephasing_family(DiscreteFunction(n, table))
            assert channel_flags(ch.kraus)["dephasing"] is True

    def test_single_kraus_bijective_is_permutation_unitary(self):
        for perm in itertools.permutations(range(4)):
            f = DiscreteFunction.from_table(perm)
            ch = generate_kraus(f, DisjointSetFamily.whole(4))
            k0 = ch.kraus.operators[0]
            assert np.array_equal(k0 @ k0.conj().T, np.eye(4))
            assert np.array_equal(k0.conj().T @ k0, np.eye(4))
            assert set(np.unique(k0.real)) <= {0.0, 1.0}

    def test_splitting_increases_zero_multiplicity(self):
        # refining any non-singleton set never removes zero eigenvalues
        for f in all_functions(3):
            fams = enumerate_valid_families(f)
            zeros = {}
            for fam in fams:
                l = build_liouville(generate_kraus(f, fam).kraus)
                zeros[fam.sets] = sum(zero_jordan_structure(l))
            for fam in fams:
                for idx, s in enumerate(fam.sets):
                    if len(s) < 2:
                        continue
                    for cut in range(1, len(s)):
                        refined = (
                            [list(t) for t in fam.sets[:idx]]
                            + [list(s[:cut]), list(s[cut:])]
                            + [list(t) for t in fam.sets[idx + 1 :]]
                        )
                        child = DisjointSetFamily.from_sets(3, refined)
                        if not validate_family(f, child):
                            continue
                        assert zeros[child.sets] >= zeros[fam.sets]

    def test_within_set_superposition_preserved(self, rng):
        ch = generate_kraus(F4, FAM4)
        for _ in range(25):
            a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            amps = np.zeros(4, dtype=complex)
            amps[2], amps[3] = a, b
            rho = DensityOperator.pure(amps)
            out = apply_to_matrix(ch.kraus, rho.matrix)
            w = np.zeros(4, dtype=complex)
            norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
            w[0], w[1] = a / norm, b / norm
            assert np.max(np.abs(out - np.outer(w, w.conj()))) < 1e-12

    def test_cycle_inside_one_set_acts_unitarily(self):
        # 2-cycle {0,1} inside one family set: restriction is the cyclic shift
        f = DiscreteFunction.from_table([1, 0, 1])
        fam = DisjointSetFamily.from_sets(3, [(0, 1), (2,)])
        ch = generate_kraus(f, fam)
        sub = np.zeros((3, 3), dtype=complex)
        for x in (0, 1):
            sub[f.table[x], x] = 1.0
        restriction = ch.kraus.operators[0][:2, :2]
        assert np.array_equal(restriction, sub[:2, :2])
        assert np.array_equal(restriction @ restriction.conj().T, np.eye(2))
