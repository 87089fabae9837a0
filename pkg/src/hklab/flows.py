"""Exact max-flow / min-cut on small graphs (shortest augmenting paths).

Capacities are Fractions (or ints); the flow is exact.  BFS scans arcs in
insertion order, so results are deterministic.
"""

from __future__ import annotations

from fractions import Fraction


class FlowNetwork:
    def __init__(self, n: int):
        self.n = n
        self.to: list[int] = []
        self.cap: list[Fraction] = []
        self.adj: list[list[int]] = [[] for _ in range(n)]

    def add_arc(self, u: int, v: int, capacity) -> int:
        """Add arc u->v; returns its arc index (reverse arc is index+1)."""
        a = len(self.to)
        self.to.append(v)
        self.cap.append(Fraction(capacity))
        self.adj[u].append(a)
        self.to.append(u)
        self.cap.append(Fraction(0))
        self.adj[v].append(a + 1)
        return a

    def max_flow(self, source: int, sink: int) -> Fraction:
        total = Fraction(0)
        while True:
            parent_arc = [-1] * self.n
            parent_arc[source] = -2
            queue = [source]
            qi = 0
            while qi < len(queue) and parent_arc[sink] == -1:
                u = queue[qi]
                qi += 1
                for a in self.adj[u]:
                    v = self.to[a]
                    if parent_arc[v] == -1 and self.cap[a] > 0:
                        parent_arc[v] = a
                        queue.append(v)
            if parent_arc[sink] == -1:
                return total
            bottleneck = None
            v = sink
            while v != source:
                a = parent_arc[v]
                if bottleneck is None or self.cap[a] < bottleneck:
                    bottleneck = self.cap[a]
                v = self.to[a ^ 1]
            v = sink
            while v != source:
                a = parent_arc[v]
                self.cap[a] -= bottleneck
                self.cap[a ^ 1] += bottleneck
                v = self.to[a ^ 1]
            total += bottleneck

    def source_side(self, source: int) -> set[int]:
        """Vertices reachable from source in the residual graph."""
        seen = {source}
        queue = [source]
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for a in self.adj[u]:
                v = self.to[a]
                if v not in seen and self.cap[a] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen

    def flow_on(self, arc: int, original_cap) -> Fraction:
        """Flow routed through an arc added with capacity original_cap."""
        return Fraction(original_cap) - self.cap[arc]


def min_cut_side(n: int, pair_caps: dict[tuple[int, int], Fraction], source: int, sink: int):
    """Undirected min cut between source and sink.

    pair_caps maps unordered index pairs (u < v) to capacities.  Returns
    (cut value, source side set).  The cut value of a side S is the total
    capacity of pairs with exactly one endpoint in S.
    """
    net = FlowNetwork(n)
    for (u, v), c in sorted(pair_caps.items()):
        if c > 0:
            net.add_arc(u, v, c)
            net.add_arc(v, u, c)
    value = net.max_flow(source, sink)
    return value, net.source_side(source)
