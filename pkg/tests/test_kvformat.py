import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from fuzzyclf.kvformat import KVFormatError, dumps_kv, get, get_array, loads_kv


@given(arrays(np.float64, st.tuples(st.integers(0, 4), st.integers(1, 4)),
              elements=st.floats(allow_nan=False, allow_infinity=False)))
def test_float_arrays_round_trip_exactly(arr):
    kv = loads_kv(dumps_kv({"a": arr}))
    np.testing.assert_array_equal(get_array(kv, "a"), arr)


def test_scalars_and_header():
    text = dumps_kv({"n": 3, "x": 0.1, "flag": True, "name": "rbf"}, header="model\nsecond line")
    assert text.startswith("# model\n# second line\nformat = fuzzyclf-kv\nschema_version = 1\n")
    kv = loads_kv(text)
    assert get(kv, "n", int) == 3 and get(kv, "x", float) == 0.1
    assert get(kv, "flag", bool) is True and get(kv, "name") == "rbf"
    np.testing.assert_array_equal(get_array(loads_kv(dumps_kv({"i": np.arange(6).reshape(2, 3)})), "i", int),
                                  [[0, 1, 2], [3, 4, 5]])


@pytest.mark.parametrize(
    "text",
    [
        "a = 1\n",
        "format = other\nschema_version = 1\n",
        "format = fuzzyclf-kv\nschema_version = 2\n",
        "format = fuzzyclf-kv\nschema_version = 1\nbroken line\n",
    ],
)
def test_rejects_bad_files(text):
    with pytest.raises(KVFormatError):
        loads_kv(text)


def test_missing_and_misshaped_entries():
    kv = loads_kv(dumps_kv({"a": np.zeros(3)}))
    with pytest.raises(KVFormatError):
        get(kv, "b")
    kv["a.shape"] = "2 2"
    with pytest.raises(KVFormatError):
        get_array(kv, "a")
    with pytest.raises(KVFormatError):
        dumps_kv({"bad=key": 1})
    with pytest.raises(KVFormatError):
        dumps_kv({"k": "two\nlines"})
