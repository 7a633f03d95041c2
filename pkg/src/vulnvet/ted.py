"""Ordered-tree edit distance with unit costs (Zhang-Shasha).

Unit-cost node insertion, deletion, and relabel; the minimum edit-script
cost between two canonical trees.
"""

from __future__ import annotations

from .canonical import CTree


class _Annotated:
    """Post-order arrays: labels, leftmost-leaf descendants, keyroots."""

    def __init__(self, root: CTree):
        self.labels = []
        self.lmld = []
        self._walk(root)
        n = len(self.labels)
        seen = set()
        keyroots = []
        for i in range(n - 1, -1, -1):
            if self.lmld[i] not in seen:
                seen.add(self.lmld[i])
                keyroots.append(i)
        self.keyroots = sorted(keyroots)

    def _walk(self, node: CTree) -> int:
        first_leaf = None
        for child in node.children:
            leaf = self._walk(child)
            if first_leaf is None:
                first_leaf = leaf
        index = len(self.labels)
        self.labels.append(node.label)
        self.lmld.append(first_leaf if first_leaf is not None else index)
        return self.lmld[index]


def tree_edit_distance(a: CTree, b: CTree) -> int:
    ta, tb = _Annotated(a), _Annotated(b)
    m, n = len(ta.labels), len(tb.labels)
    treedist = [[0] * n for _ in range(m)]

    for i in ta.keyroots:
        for j in tb.keyroots:
            _compute(ta, tb, i, j, treedist)
    return treedist[m - 1][n - 1]


def _compute(ta, tb, i, j, treedist):
    li, lj = ta.lmld[i], tb.lmld[j]
    m = i - li + 2
    n = j - lj + 2
    fd = [[0] * n for _ in range(m)]
    for x in range(1, m):
        fd[x][0] = fd[x - 1][0] + 1
    for y in range(1, n):
        fd[0][y] = fd[0][y - 1] + 1
    for x in range(1, m):
        for y in range(1, n):
            ai = li + x - 1
            bj = lj + y - 1
            if ta.lmld[ai] == li and tb.lmld[bj] == lj:
                relabel = 0 if ta.labels[ai] == tb.labels[bj] else 1
                fd[x][y] = min(fd[x - 1][y] + 1,
                               fd[x][y - 1] + 1,
                               fd[x - 1][y - 1] + relabel)
                treedist[ai][bj] = fd[x][y]
            else:
                xa = ta.lmld[ai] - li
                yb = tb.lmld[bj] - lj
                fd[x][y] = min(fd[x - 1][y] + 1,
                               fd[x][y - 1] + 1,
                               fd[xa][yb] + treedist[ai][bj])
