import itertools

import pytest

from recoflow.errors import BoundsError, ValidityError
from recoflow.partitions import enumerate_partitions
from recoflow.typespace import Fragment, TypeSpace


def test_project_selects_coordinates():
    sp = TypeSpace.binary(3)
    assert sp.project((1, 0, 1), [1, 3]) == Fragment((1, 3), (1, 1))
    assert sp.project((1, 0, 1), [1, 2, 3]).letters == (1, 0, 1)
    assert TypeSpace.binary(2).project((0, 1), [2]) == Fragment((2,), (1,))


def test_project_rejects_bad_sites():
    sp = TypeSpace.binary(3)
    with pytest.raises(BoundsError):
        sp.project((0, 0, 0), [])
    with pytest.raises(BoundsError):
        sp.project((0, 0, 0), [4])


def test_join_two_parent_crossover():
    sp = TypeSpace((2, 3, 2))
    x, y = (1, 2, 0), (0, 1, 1)
    child = sp.join([sp.project(x, [1, 2]), sp.project(y, [3])])
    assert child == (1, 2, 1)
    assert sp.join([sp.project(x, [1, 2, 3])]) == x


def test_join_rejects_overlap_and_gap():
    sp = TypeSpace.binary(3)
    with pytest.raises(ValidityError):
        sp.join([Fragment((1, 2), (0, 0)), Fragment((2, 3), (1, 1))])
    with pytest.raises(ValidityError):
        sp.join([Fragment((1,), (0,)), Fragment((3,), (1,))])


def test_split_and_rejoin_is_identity():
    sp = TypeSpace((2, 3, 2))
    for x in sp.types:
        for p in enumerate_partitions(3):
            frags = [sp.project(x, b) for b in p.blocks]
            assert sp.join(frags) == tuple(x)
            for b, f in zip(p.blocks, frags):
                assert sp.project(sp.join(frags), b) == f


def test_binary_index_reads_as_binary_number():
    sp = TypeSpace.binary(3)
    assert sp.encode((1, 0, 1)) == 5
    assert sp.encode((0, 0, 0)) == 0
    for bits in itertools.product((0, 1), repeat=3):
        assert sp.encode(bits) == 4 * bits[0] + 2 * bits[1] + bits[2]


@pytest.mark.parametrize("sizes", [(2, 3, 2), (4, 4, 4, 4, 4, 4), (1, 5)])
def test_encode_decode_bijection(sizes):
    sp = TypeSpace(sizes)
    assert sp.size <= 4096
    seen = set()
    for i in range(sp.size):
        x = sp.decode(i)
        assert sp.encode(x) == i
        seen.add(x)
    assert len(seen) == sp.size
    assert [tuple(r) for r in sp.types] == [sp.decode(i) for i in range(sp.size)]


def test_out_of_range():
    sp = TypeSpace((2, 3))
    with pytest.raises(BoundsError):
        sp.encode((0, 3))
    with pytest.raises(BoundsError):
        sp.decode(6)
    with pytest.raises(BoundsError):
        TypeSpace((0, 2))
    with pytest.raises(BoundsError):
        TypeSpace((2,) * 21)


def test_labels_round_trip():
    sp = TypeSpace((2, 3, 2))
    for x in sp.types:
        assert sp.parse_label(sp.label(x)) == tuple(x)
    wide = TypeSpace((12, 2))
    assert wide.label((11, 1)) == "11.1"
    assert wide.parse_label("11.1") == (11, 1)
