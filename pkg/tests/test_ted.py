import random

from helpers import random_ctree, ted_oracle
from vulnvet.canonical import CTree
from vulnvet.ted import tree_edit_distance


def t(label, *children):
    return CTree(label, tuple(children))


def test_identical_trees():
    a = t("a", t("b"), t("c", t("d")))
    assert tree_edit_distance(a, a) == 0


def test_single_relabel():
    assert tree_edit_distance(t("a", t("b")), t("a", t("c"))) == 1


def test_single_delete():
    assert tree_edit_distance(t("a", t("b", t("c"))), t("a", t("c"))) == 1


def test_delete_splices_children():
    # removing the middle node keeps its children in order
    a = t("r", t("x", t("p"), t("q")))
    b = t("r", t("p"), t("q"))
    assert tree_edit_distance(a, b) == 1


def test_order_sensitivity():
    a = t("r", t("x"), t("y"))
    b = t("r", t("y"), t("x"))
    assert tree_edit_distance(a, b) == 2


def test_disjoint_trees_cost_is_bounded():
    a = t("a", t("b"))
    b = t("c", t("d"), t("e"))
    d = tree_edit_distance(a, b)
    assert 0 < d <= 5
    assert d == ted_oracle(a, b)


def test_random_pairs_against_oracle():
    rng = random.Random(77)
    for _ in range(150):
        a = random_ctree(rng, 6, ("a", "b", "c"))
        b = random_ctree(rng, 6, ("a", "b", "c"))
        assert tree_edit_distance(a, b) == ted_oracle(a, b)
