import pytest

from snprlab.netcore import validate


@pytest.fixture
def triple_ab_c():
    # ((a,b),c): root 0, inner spine 1, cherry vertex 2
    return validate([(0, 1), (1, 2), (1, 5), (2, 3), (2, 4)],
                    {3: "a", 4: "b", 5: "c"})


@pytest.fixture
def triple_ac_b():
    # ((a,c),b)
    return validate([(0, 1), (1, 2), (1, 5), (2, 3), (2, 4)],
                    {3: "a", 4: "c", 5: "b"})


@pytest.fixture
def triple_a_bc():
    # (a,(b,c))
    return validate([(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)],
                    {2: "a", 4: "b", 5: "c"})


@pytest.fixture
def retic_ab_c():
    # ((a,(b)#H1),(#H1,c)): one reticulation 6 above leaf b
    return validate([(0, 1), (1, 2), (1, 3), (2, 4), (2, 6), (3, 6), (3, 5), (6, 7)],
                    {4: "a", 7: "b", 5: "c"})


@pytest.fixture
def stack_sibling_host():
    # two leaves, three reticulation edges worth of trouble: r1, r2 are
    # siblings under vertex 3 and also stacked (4 -> 5); not tree-child
    return validate([(0, 1), (1, 2), (1, 3), (2, 4), (2, 6), (3, 4), (3, 5),
                     (4, 5), (5, 7)],
                    {6: "a", 7: "b"})


@pytest.fixture
def parallel_one_leaf():
    # parallel pair into a reticulation above the only leaf; not tree-child
    return validate([(0, 1), (1, 2, 0), (1, 2, 1), (2, 3)], {3: "a"})
