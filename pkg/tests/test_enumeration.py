import json
import math

import numpy as np
import pytest

from funchan.discrete import DiscreteFunction
from funchan.enumeration import (
    all_channel_classes,
    build_catalog,
    canonical_function_classes,
    catalog_to_csv,
    catalog_to_json,
    channel_class_key,
    commuting_pairs_bruteforce,
    commuting_pairs_count,
    count_functions_bruteforce,
    count_functions_formula,
)
from funchan.errors import CapabilityError, DomainError

# functions on n unlabeled points: 1, 3, 7, 19, 47, 130, ...
KNOWN_COUNTS = {1: 1, 2: 3, 3: 7, 4: 19, 5: 47, 6: 130}


class TestCounting:
    def test_known_values(self):
        for n, expected in KNOWN_COUNTS.items():
            assert count_functions_formula(n) == expected

    def test_formula_matches_bruteforce(self):
        for n in range(1, 6):
            assert count_functions_formula(n) == count_functions_bruteforce(n)

    def test_formula_scales(self):
        # integrality of the rational sum is asserted inside
        assert count_functions_formula(12) > count_functions_formula(11)

    def test_bruteforce_cap(self):
        with pytest.raises(CapabilityError):
            count_functions_bruteforce(7)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            count_functions_formula(0)

    def test_class_representatives(self):
        reps = canonical_function_classes(3)
        assert len(reps) == 7
        tables = {r.table for r in reps}
        # one representative per shape: constant, identity, 3-cycle, ...
        assert (0, 0, 0) in tables
        assert (0, 1, 2) in tables


class TestCommutingPairs:
    def test_small_values(self):
        assert commuting_pairs_count(1) == 1
        assert commuting_pairs_count(2) == 6
        assert commuting_pairs_count(3) == 42

    def test_formula_matches_bruteforce(self):
        for n in range(1, 5):
            assert commuting_pairs_count(n) == commuting_pairs_bruteforce(n)

    def test_burnside_relation(self):
        # pair count / n! must equal the orbit count, exactly
        for n in range(1, 7):
            pairs = commuting_pairs_count(n)
            assert pairs == math.factorial(n) * count_functions_formula(n)
            assert pairs % math.factorial(n) == 0

    def test_bruteforce_cap(self):
        with pytest.raises(CapabilityError):
            commuting_pairs_bruteforce(6)


class TestCatalog:
    def test_two_state_entries(self):
        labels = [e.label for e in build_catalog(2)]
        assert labels == ["B_1", "C_1", "A_2", "B_2", "C_2"]

    def test_three_state_entries(self):
        labels = [e.label for e in build_catalog(3)]
        assert len(labels) == 20
        assert labels[:3] == ["B_1", "C_1", "E_1"]
        assert labels[-7:] == ["A_3", "B_3", "C_3", "D_3", "E_3", "F_3", "G_3"]

    def test_covers_every_channel_class_exactly_once(self):
        for n in (2, 3):
            catalog_keys = [
                channel_class_key(e.channel.f, e.channel.family)
                for e in build_catalog(n)
            ]
            assert len(catalog_keys) == len(set(catalog_keys))
            assert set(catalog_keys) == all_channel_classes(n)

    def test_e3_row(self):
        (entry,) = [e for e in build_catalog(3) if e.label == "E_3"]
        eigs = sorted(round(v.real, 9) for v in entry.report.eigenvalues)
        assert eigs == [-1, 0, 0, 0, 0, 0, 0, 1, 1]
        assert entry.report.flags.dephasing and entry.report.flags.unital

    def test_d2b_row(self):
        (entry,) = [e for e in build_catalog(3) if e.label == "D_2b"]
        unit = sorted(round(v.real, 9) for v in entry.report.eigenvalues if abs(v) > 0.5)
        assert unit == [-1, 1]
        assert entry.report.zero_count == 7
        assert entry.report.generalized_eigenvector_count() == 2

    def test_unitary_flag(self):
        by_label = {e.label: e for e in build_catalog(3)}
        assert by_label["B_1"].unitary and by_label["C_1"].unitary and by_label["E_1"].unitary
        assert not by_label["B_2"].unitary

    def test_rejects_other_sizes(self):
        with pytest.raises(DomainError):
            build_catalog(4)

    def test_json_and_csv_round(self):
        entries = build_catalog(2)
        payload = json.loads(catalog_to_json(entries))
        assert [row["label"] for row in payload] == ["B_1", "C_1", "A_2", "B_2", "C_2"]
        assert payload[2]["flags"]["dephasing"] is True
        csv_text = catalog_to_csv(entries)
        assert csv_text.count("\n") == 6  # header + 5 rows
