import math

import numpy as np
import pytest

from plurienv.extreal import FINITE, NEG_INF, POS_INF, UNDEFINED, ExtReal, clip_sentinel

STATES = {
    FINITE: ExtReal(1.5),
    POS_INF: ExtReal(math.inf),
    NEG_INF: ExtReal(-math.inf),
    UNDEFINED: ExtReal.undefined(),
}

# expected state of a + b, indexed by (state(a), state(b))
ADD_TABLE = {
    (FINITE, FINITE): FINITE,
    (FINITE, POS_INF): POS_INF,
    (FINITE, NEG_INF): NEG_INF,
    (POS_INF, POS_INF): POS_INF,
    (POS_INF, NEG_INF): UNDEFINED,
    (NEG_INF, NEG_INF): NEG_INF,
}


@pytest.mark.parametrize("a", list(STATES))
@pytest.mark.parametrize("b", list(STATES))
def test_addition_table(a, b):
    got = (STATES[a] + STATES[b]).state
    if UNDEFINED in (a, b):
        assert got == UNDEFINED
    else:
        key = (a, b) if (a, b) in ADD_TABLE else (b, a)
        assert got == ADD_TABLE[key]


@pytest.mark.parametrize("a", list(STATES))
@pytest.mark.parametrize("b", list(STATES))
def test_subtraction_is_addition_of_negation(a, b):
    assert (STATES[a] - STATES[b]).state == (STATES[a] + (-STATES[b])).state


def test_finite_arithmetic():
    assert (ExtReal(0.25) - ExtReal(1.0)).value == -0.75


def test_sentinel_maps_to_neg_inf():
    assert ExtReal(-1e31).state == NEG_INF
    assert clip_sentinel(-2e30) == -math.inf
    np.testing.assert_array_equal(clip_sentinel([1.0, -1e40]), [1.0, -np.inf])
