"""Left, right and two-sided cells from the W-graph of a finite Coxeter group."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .coxeter import CoxeterGroup
from .hecke import KLTable

__all__ = [
    "CellPartition",
    "left_cell_graph",
    "right_cell_graph",
    "strongly_connected_components",
    "compute_cells",
    "intersection_with_inverse",
    "DistinguishedInvolutionError",
]

KINDS = ("left", "right", "twosided")


class DistinguishedInvolutionError(RuntimeError):
    pass


def left_cell_graph(g: CoxeterGroup, kl: KLTable) -> list[list[int]]:
    """Adjacency lists: ``y -> x`` whenever ``c_x`` occurs in some ``c_s c_y``.

    For ``sy > y`` that means ``x = sy`` or ``x < y`` with ``sx < x`` and
    ``mu(x, y) != 0``; generators with ``sy < y`` only rescale ``c_y``.
    """
    n = g.rank
    adj: list[list[int]] = []
    for y in range(g.order):
        ld = int(g.left_descent_mask[y])
        out = set()
        ascents = [i for i in range(n) if not ld >> i & 1]
        for i in ascents:
            out.add(int(g.lmul[i, y]))
        if ascents:
            for z in kl.mu_row(y):
                zd = int(g.left_descent_mask[z])
                if any(zd >> i & 1 for i in ascents):
                    out.add(z)
        adj.append(sorted(out))
    return adj


def right_cell_graph(g: CoxeterGroup, left_adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Right edges are the left edges conjugated by inversion."""
    inv = g.inverse
    adj: list[list[int]] = [[] for _ in range(g.order)]
    for y, outs in enumerate(left_adj):
        adj[int(inv[y])] = sorted(int(inv[x]) for x in outs)
    return adj


def strongly_connected_components(adj: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative so deep graphs do not hit the recursion limit."""
    N = len(adj)
    index = [-1] * N
    low = [0] * N
    on_stack = [False] * N
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(N):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            nbrs = adj[v]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


@dataclass
class CellPartition:
    kind: str
    blocks: list[list[int]]
    block_of: list[int] = field(default_factory=list)
    labels: list[str] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        self.blocks = sorted((sorted(b) for b in self.blocks), key=lambda b: b[0])
        total = sum(len(b) for b in self.blocks)
        self.block_of = [-1] * total
        for k, b in enumerate(self.blocks):
            for x in b:
                if self.block_of[x] != -1:
                    raise ValueError("blocks overlap")
                self.block_of[x] = k

    def __len__(self):
        return len(self.blocks)

    def sizes(self) -> list[int]:
        return [len(b) for b in self.blocks]

    def lines(self) -> list[str]:
        return [f"cell {self.kind} {k} size={len(b)} elements={','.join(map(str, b))}"
                for k, b in enumerate(self.blocks)]


def compute_cells(g: CoxeterGroup, kl: KLTable, kind: str = "left",
                  left_adj: Sequence[Sequence[int]] | None = None) -> CellPartition:
    if left_adj is None:
        left_adj = left_cell_graph(g, kl)
    if kind == "left":
        adj = left_adj
    elif kind == "right":
        adj = right_cell_graph(g, left_adj)
    elif kind == "twosided":
        right = right_cell_graph(g, left_adj)
        adj = [sorted(set(a) | set(b)) for a, b in zip(left_adj, right)]
    else:
        raise ValueError(f"kind must be one of {KINDS}")
    return CellPartition(kind, strongly_connected_components(adj))


def intersection_with_inverse(g: CoxeterGroup, cell: Sequence[int]) -> list[int]:
    """``cell`` intersected with its inverse set, ordered by (length, ShortLex)."""
    members = set(cell)
    # element indices are already ShortLex ordered, length first
    return sorted(x for x in members if int(g.inverse[x]) in members)
