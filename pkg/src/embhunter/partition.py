"""K-ary hierarchical partitioning of a symmetric low-dimensional box.

Cells are kept in exact integer coordinates: along coordinate ``c`` a cell at
split level ``k`` with index ``m`` spans

    [B * (2m / K^k - 1),  B * (2(m+1) / K^k - 1)]

for the box half-width ``B``. Base points are the cell centers, stored as a
tuple of reduced fractions ``(2m + 1 - K^k) / K^k`` (in units of ``B``). With
``K`` odd, the middle child's fraction reduces to its parent's, so both nodes
address the same :class:`BasePointLedger` entry.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .embedding import EvaluationRecord
from .spaces import BoxSpace


@dataclass
class LedgerEntry:
    count: int = 0
    best: float = float("inf")
    record: EvaluationRecord | None = None


class BasePointLedger:
    """Evaluation count and best value per exact base point."""

    def __init__(self):
        self._entries: dict[tuple[Fraction, ...], LedgerEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key) -> bool:
        return key in self._entries

    def __getitem__(self, key) -> LedgerEntry:
        return self._entries[key]

    def get(self, key) -> LedgerEntry:
        return self._entries.get(key) or LedgerEntry()

    def count(self, key) -> int:
        entry = self._entries.get(key)
        return entry.count if entry else 0

    def record(self, key, rec: EvaluationRecord) -> LedgerEntry:
        entry = self._entries.setdefault(key, LedgerEntry())
        entry.count += 1
        if rec.value < entry.best:
            entry.best = rec.value
            entry.record = rec
        return entry

    def items(self):
        return self._entries.items()


@dataclass(eq=False)
class TreeNode:
    depth: int
    index: int
    cell: tuple[int, ...]               # per-coordinate cell index m_c
    key: tuple[Fraction, ...]           # base point in units of the half-width
    point: np.ndarray                   # float base point
    sq_norm: Fraction                   # exact squared norm, units of B^2
    norm: float
    parent: "TreeNode | None" = None
    children: list["TreeNode"] = field(default_factory=list)
    fstar: float | None = None
    expanded: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.expanded

    def __repr__(self) -> str:
        return f"TreeNode(h={self.depth}, i={self.index}, f*={self.fstar})"


@dataclass
class NormGroup:
    depth: int
    rank: int                           # 1 = largest norm
    sq_norm: Fraction
    members: list[TreeNode]


def split_levels(depth: int, d: int) -> tuple[int, ...]:
    """Number of splits each coordinate has received at ``depth``.

    Depth ``h`` is split along coordinate ``h mod d``.
    """
    return tuple((depth + d - 1 - c) // d for c in range(d))


class PartitionTree:
    """K-ary cell tree over a symmetric box, with leaves grouped by depth."""

    def __init__(self, space: BoxSpace, K: int = 3):
        if not space.is_symmetric:
            raise ValueError("partitioning requires a symmetric box")
        if K < 3 or K % 2 == 0:
            raise ValueError(f"partition factor K must be odd and >= 3, got {K}")
        self.space = space
        self.K = K
        self.d = space.dim
        self.half_width = space.half_width
        self.ledger = BasePointLedger()
        self._leaves: dict[int, dict[int, TreeNode]] = {}
        # depth -> squared norm -> index -> leaf, plus cached descending norms
        self._by_norm: dict[int, dict[Fraction, dict[int, TreeNode]]] = {}
        self._norm_order: dict[int, list[Fraction]] = {}
        self.n_nodes = 0
        self.root = self._make_node(0, 0, (0,) * self.d, None)

    # -- construction -----------------------------------------------------

    def _make_node(self, depth, index, cell, parent) -> TreeNode:
        levels = split_levels(depth, self.d)
        key = tuple(Fraction(2 * m + 1 - self.K ** k, self.K ** k) for m, k in zip(cell, levels))
        point = np.array([float(self.half_width * q) for q in key])
        sq = sum((q * q for q in key), Fraction(0))
        node = TreeNode(depth, index, cell, key, point, sq, float(np.sqrt(point @ point)), parent)
        self._leaves.setdefault(depth, {})[index] = node
        groups = self._by_norm.setdefault(depth, {})
        if sq not in groups:
            groups[sq] = {}
            self._norm_order.pop(depth, None)
        groups[sq][index] = node
        self.n_nodes += 1
        return node

    def expand(self, node: TreeNode) -> list[TreeNode]:
        """Split a leaf into K children along coordinate ``depth mod d``."""
        if node.expanded:
            raise ValueError(f"node ({node.depth}, {node.index}) is already expanded")
        c = node.depth % self.d
        del self._leaves[node.depth][node.index]
        if not self._leaves[node.depth]:
            del self._leaves[node.depth]
        groups = self._by_norm[node.depth]
        del groups[node.sq_norm][node.index]
        if not groups[node.sq_norm]:
            del groups[node.sq_norm]
            self._norm_order.pop(node.depth, None)
        node.expanded = True
        for k in range(self.K):
            cell = list(node.cell)
            cell[c] = node.cell[c] * self.K + k
            child = self._make_node(node.depth + 1, node.index * self.K + k, tuple(cell), node)
            node.children.append(child)
        return node.children

    # -- queries ----------------------------------------------------------

    @property
    def depth(self) -> int:
        return max(self._leaves)

    def leaves(self, depth: int | None = None) -> list[TreeNode]:
        if depth is None:
            return [n for h in sorted(self._leaves) for n in self._leaves[h].values()]
        return list(self._leaves.get(depth, {}).values())

    def nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def cell_bounds(self, node: TreeNode) -> list[tuple[Fraction, Fraction]]:
        """Exact ``(lower, upper)`` of the node's cell per coordinate."""
        B = self.half_width
        out = []
        for m, k in zip(node.cell, split_levels(node.depth, self.d)):
            w = Fraction(2, self.K ** k)
            out.append((B * (m * w - 1), B * ((m + 1) * w - 1)))
        return out

    def norm_groups(self, depth: int) -> list[NormGroup]:
        """Leaves at ``depth`` grouped by base-point norm, largest first."""
        groups = self._by_norm.get(depth)
        if not groups:
            return []
        order = self._norm_order.get(depth)
        if order is None:
            order = self._norm_order[depth] = sorted(groups, reverse=True)
        return [NormGroup(depth, j, sq, list(groups[sq].values()))
                for j, sq in enumerate(order, start=1)]

    def best_node(self) -> TreeNode:
        return min((n for n in self.nodes() if n.fstar is not None),
                   key=lambda n: (n.fstar, n.depth, n.index))

    def dump_csv(self, fh) -> None:
        """Write one row per node: depth, index, base point, f*, evaluation count."""
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["depth", "index", "base_point", "fstar", "eval_count", "leaf"])
        for node in sorted(self.nodes(), key=lambda n: (n.depth, n.index)):
            w.writerow([node.depth, node.index, " ".join(repr(float(v)) for v in node.point),
                        "" if node.fstar is None else repr(node.fstar),
                        self.ledger.count(node.key), int(node.is_leaf)])


def make_root(space: BoxSpace, K: int = 3) -> PartitionTree:
    return PartitionTree(space, K)


def norm_groups(tree: PartitionTree, depth: int) -> list[NormGroup]:
    return tree.norm_groups(depth)


def select_in_group(group: NormGroup | list[TreeNode]) -> TreeNode:
    """Member with the smallest f*, ties going to the smallest node index."""
    members = group.members if isinstance(group, NormGroup) else group
    if not members:
        raise ValueError("cannot select from an empty group")
    return min(members, key=lambda n: (n.fstar, n.index))
