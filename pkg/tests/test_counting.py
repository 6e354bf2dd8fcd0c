import math
from fractions import Fraction

import gmpy2
import mpmath
import pytest

from stallings.counting import (CACHE_VERSION, build_injection_table, check_injection_bounds,
                                load_table, save_table, subgroup_count_estimate,
                                verify_pointing_identity)
from stallings.oracle import enumerate_partial_injections

from conftest import A002720


def test_first_values():
    assert build_injection_table(10).values == A002720


@pytest.mark.parametrize("n_max, want", [(0, [1]), (1, [1, 2])])
def test_degenerate_tables(n_max, want):
    t = build_injection_table(n_max)
    assert t.values == want
    assert len(t) == n_max + 1


def test_negative_n_max():
    with pytest.raises(ValueError):
        build_injection_table(-1)


def test_out_of_range_lookup(small_table):
    with pytest.raises(IndexError):
        small_table[61]
    with pytest.raises(IndexError):
        small_table[-1]


def test_recurrence_and_growth(table_500):
    v = table_500.values
    for k in range(2, 501):
        assert v[k] == 2 * k * v[k - 1] - (k - 1) ** 2 * v[k - 2]
    for k in range(1, 501):
        assert v[k] >= (k + 1) * v[k - 1]


def test_matches_brute_force_enumeration(small_table):
    for n in range(7):
        assert len(enumerate_partial_injections(n)) == small_table[n]


def test_matches_component_sum():
    # I_n = sum_k C(n,k)^2 k!  (choose domain, image, bijection)
    t = build_injection_table(40)
    for n in range(41):
        assert t[n] == sum(math.comb(n, k) ** 2 * math.factorial(k) for k in range(n + 1))


def test_sparse_table_agrees_with_dense():
    dense = build_injection_table(700)
    sparse = build_injection_table(700, stride=64)
    assert not sparse.dense
    for k in list(range(701))[::-1]:  # reverse order crosses block boundaries
        assert sparse[k] == dense[k]
    assert (sparse.log_egs == dense.log_egs).all()


def test_float_rows_against_exact():
    t = build_injection_table(300)
    with mpmath.workprec(200):
        for n in (1, 2, 7, 50, 300):
            a = [mpmath.mpf(int(t[j])) / mpmath.factorial(j) for j in range(n + 1)]
            assert t.log_egs[n] == pytest.approx(float(mpmath.log(a[n])), rel=1e-14, abs=1e-14)
            head = sum(a[:n]) / a[n]
            head2 = sum((n - j) * a[j] for j in range(n)) / a[n]
            assert t.head[n] == pytest.approx(float(head), rel=1e-14)
            assert t.head2[n] == pytest.approx(float(head2), rel=1e-14)


def test_float_arrays_read_only(small_table):
    with pytest.raises(ValueError):
        small_table.head[3] = 0.0


def test_pointing_identity(table_500):
    assert all(verify_pointing_identity(n, table_500) for n in range(1, 201))


def test_pointing_identity_small_by_hand():
    t = build_injection_table(2)
    # 2 * 1 * I_1 + 3 * 1 * I_0 = 7
    assert 2 * t[1] + 3 * t[0] == t[2]
    assert verify_pointing_identity(2, t)


def test_pointing_identity_detects_bad_table():
    t = build_injection_table(5)
    t._anchors[5] += 1
    assert not verify_pointing_identity(5, t)


def test_injection_bounds(table_500):
    assert all(check_injection_bounds(n, table_500) for n in range(1, 501))


def test_injection_bounds_equality_at_one():
    assert check_injection_bounds(1, build_injection_table(1))


def test_injection_bounds_detects_bad_value():
    t = build_injection_table(8)
    t._anchors[8] = t._anchors[8] * 3
    assert not check_injection_bounds(8, t)


@pytest.mark.parametrize("n, want", [(1, 4), (2, 49), (3, 578)])
def test_subgroup_estimate(n, want, small_table):
    est = subgroup_count_estimate(n, 2, small_table)
    assert est.leading == want
    assert math.gcd(est.numerator, est.denominator) == 1


def test_subgroup_estimate_log_forms(small_table):
    n = 60
    est = subgroup_count_estimate(n, 3, small_table)
    assert est.leading == Fraction(int(small_table[n]) ** 3, math.factorial(n - 1))
    want = 3 * math.log(int(small_table[n])) - math.lgamma(n)
    assert float(est.leading_log) == pytest.approx(want, rel=1e-12)
    # the Stirling form is asymptotic only; it should be close in log scale
    assert abs(float(est.stirling_log) - want) / want < 0.01


def test_subgroup_estimate_rejects_rank_one(small_table):
    with pytest.raises(ValueError):
        subgroup_count_estimate(3, 1, small_table)


@pytest.mark.parametrize("n_max, stride", [(0, None), (30, None), (600, 64)])
def test_cache_round_trip(tmp_path, n_max, stride):
    t = build_injection_table(n_max, stride)
    path = tmp_path / "table.txt"
    save_table(t, path)
    back = load_table(path)
    assert back.n_max == t.n_max and back.stride == t.stride
    assert back.values == t.values
    assert (back.log_egs == t.log_egs).all()
    assert (back.head == t.head).all()
    assert (back.head2 == t.head2).all()
    text = path.read_text().splitlines()
    assert text[1] == f"version {CACHE_VERSION}"


def _corruptions(text):
    lines = text.split("\n")
    yield "\n".join(lines[:-5])  # truncated
    yield text.replace("version 1", "version 99")
    yield text.replace("\n7\n", "\n8\n", 1).replace(" 7\n", " 8\n", 1)
    yield "garbage"
    bad = list(lines)
    bad[5] = "0 x"
    yield "\n".join(bad)
    bad = list(lines)
    i = bad.index("float")
    bad[i + 3] = bad[i + 3].split(" ")[0]
    yield "\n".join(bad)
    bad = list(lines)
    del bad[7]  # an exact row goes missing
    bad[4] = f"exact {int(bad[4].split()[1]) - 1}"
    yield "\n".join(bad)


def test_corrupt_cache_is_rejected(tmp_path):
    t = build_injection_table(12)
    path = tmp_path / "table.txt"
    save_table(t, path)
    good = path.read_text()
    for i, text in enumerate(_corruptions(good)):
        assert text != good, i
        path.write_text(text)
        with pytest.raises(ValueError):
            load_table(path)


def test_cache_detects_tampered_last_value(tmp_path):
    t = build_injection_table(12)
    path = tmp_path / "table.txt"
    save_table(t, path)
    last = str(t[12])
    path.write_text(path.read_text().replace(f"12 {last}", f"12 {int(last) + 1}"))
    with pytest.raises(ValueError):
        load_table(path)


def test_exact_values_are_mpz(small_table):
    assert isinstance(small_table[10], type(gmpy2.mpz(0)))
