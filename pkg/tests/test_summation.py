import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetadil._parallel import map_chunks, worker_count
from zetadil._summation import CompensatedArray, csum, two_sum_accumulate


def test_csum_is_exactly_rounded():
    vals = [1e16, 1.0, -1e16, 1j * 1e16, 1j, -1j * 1e16]
    assert csum(vals) == 1 + 1j
    assert csum([]) == 0


@given(st.lists(st.floats(-1e10, 1e10), min_size=1, max_size=200))
def test_compensated_array_matches_fsum(xs):
    acc = CompensatedArray(1, dtype=float)
    for x in xs:
        acc.add(slice(0, 1), x)
    assert abs(acc.value(0) - math.fsum(xs)) <= 1e-15 * max(1.0, sum(abs(x) for x in xs))


def test_compensated_strided_complex_slices():
    acc = CompensatedArray(10)
    acc.add(slice(1, 10, 3), np.array([1e16, 1e16, 1e16]) * (1 + 1j))
    acc.add(slice(1, 10, 3), 1 + 1j)
    acc.add(slice(1, 10, 3), np.array([-1e16, -1e16, -1e16]) * (1 + 1j))
    out = acc.result()
    np.testing.assert_array_equal(out[1::3], [1 + 1j] * 3)
    assert not np.any(np.delete(out, [1, 4, 7]))


def test_two_sum_accumulate_shape():
    out = two_sum_accumulate(np.full((2, 3), 0.1) for _ in range(10))
    assert out.shape == (2, 3)
    np.testing.assert_array_equal(out, np.full((2, 3), 1.0))
    with pytest.raises(ValueError):
        two_sum_accumulate([])


@pytest.mark.parametrize("workers", [1, 2, 4])
def test_map_chunks_independent_of_workers(workers):
    pts = np.linspace(0, 1, 10_001)
    (ref,) = map_chunks(lambda p: (np.sin(p) ** 2,), pts, chunk=97, workers=1)
    (got,) = map_chunks(lambda p: (np.sin(p) ** 2,), pts, chunk=97, workers=workers)
    np.testing.assert_array_equal(got, ref)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("ZETADIL_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("ZETADIL_WORKERS", "0")
    with pytest.raises(ValueError):
        worker_count()
    monkeypatch.delenv("ZETADIL_WORKERS")
    assert worker_count() >= 1
