"""Exact weighted matching on general graphs (Edmonds' blossom algorithm).

Primal-dual implementation with O(V^3) running time: each of at most V/2
stages grows alternating trees from all free vertices, shrinking odd cycles
into blossoms and adjusting dual variables until an augmenting path appears.
Weights are integers, which keeps every dual update exact.

Vertices are ``0 .. n-1``; blossoms get ids ``n .. 2n-1``. An edge ``k``
has two endpoints ``2k`` and ``2k+1``; ``endpoint[p]`` is the vertex of
endpoint ``p`` and ``p ^ 1`` is the opposite end.
"""

from __future__ import annotations

from typing import Iterable, Sequence

FREE, OUTER, INNER = 0, 1, 2
_MARK = 4  # temporary flag while scanning for a common base


class _Matcher:
    def __init__(self, n: int, edges: Sequence[tuple[int, int, int]], maxcardinality: bool):
        self.n = n
        self.edges = [(int(i), int(j), int(w)) for i, j, w in edges]
        self.maxcardinality = maxcardinality
        m = len(self.edges)
        self.endpoint = [self.edges[p // 2][p % 2] for p in range(2 * m)]
        self.neighbend: list[list[int]] = [[] for _ in range(n)]
        for k, (i, j, _) in enumerate(self.edges):
            self.neighbend[i].append(2 * k + 1)
            self.neighbend[j].append(2 * k)
        maxw = max([0] + [w for _, _, w in self.edges])
        self.mate = [-1] * n  # remote endpoint index of the matched edge
        self.label = [FREE] * (2 * n)
        self.labelend = [-1] * (2 * n)
        self.inblossom = list(range(n))
        self.parent = [-1] * (2 * n)
        self.childs: list = [None] * (2 * n)
        self.base = list(range(n)) + [-1] * n
        self.endps: list = [None] * (2 * n)
        self.bestedge = [-1] * (2 * n)
        self.bestedges: list = [None] * (2 * n)
        self.unused = list(range(n, 2 * n))
        # vertex duals hold twice the true value so every update stays integral
        self.dual = [maxw] * n + [0] * n
        self.allowed = [False] * m
        self.queue: list[int] = []

    # -- helpers ---------------------------------------------------------

    def slack(self, k: int) -> int:
        i, j, w = self.edges[k]
        return self.dual[i] + self.dual[j] - 2 * w

    def leaves(self, b: int):
        if b < self.n:
            yield b
            return
        stack = [b]
        while stack:
            t = stack.pop()
            if t < self.n:
                yield t
            else:
                stack.extend(self.childs[t])

    def assign_label(self, w: int, t: int, p: int):
        b = self.inblossom[w]
        self.label[w] = self.label[b] = t
        self.labelend[w] = self.labelend[b] = p
        self.bestedge[w] = self.bestedge[b] = -1
        if t == OUTER:
            self.queue.extend(self.leaves(b))
        else:
            base = self.base[b]
            mp = self.mate[base]
            self.assign_label(self.endpoint[mp], OUTER, mp ^ 1)

    def scan_blossom(self, v: int, w: int) -> int:
        """Trace back from ``v`` and ``w``; return the common base or -1 for an augmenting path."""
        path = []
        base = -1
        while v != -1 or w != -1:
            b = self.inblossom[v]
            if self.label[b] & _MARK:
                base = self.base[b]
                break
            path.append(b)
            self.label[b] = OUTER | _MARK
            if self.labelend[b] == -1:
                v = -1
            else:
                v = self.endpoint[self.labelend[b]]
                b = self.inblossom[v]
                v = self.endpoint[self.labelend[b]]
            if w != -1:
                v, w = w, v
        for b in path:
            self.label[b] = OUTER
        return base

    def add_blossom(self, base: int, k: int):
        v, w, _ = self.edges[k]
        bb = self.inblossom[base]
        bv = self.inblossom[v]
        bw = self.inblossom[w]
        b = self.unused.pop()
        self.base[b] = base
        self.parent[b] = -1
        self.parent[bb] = b
        path: list[int] = []
        endps: list[int] = []
        while bv != bb:
            self.parent[bv] = b
            path.append(bv)
            endps.append(self.labelend[bv])
            v = self.endpoint[self.labelend[bv]]
            bv = self.inblossom[v]
        path.append(bb)
        path.reverse()
        endps.reverse()
        endps.append(2 * k)
        while bw != bb:
            self.parent[bw] = b
            path.append(bw)
            endps.append(self.labelend[bw] ^ 1)
            w = self.endpoint[self.labelend[bw]]
            bw = self.inblossom[w]
        self.childs[b] = path
        self.endps[b] = endps
        self.label[b] = OUTER
        self.labelend[b] = self.labelend[bb]
        self.dual[b] = 0
        for v in self.leaves(b):
            if self.label[self.inblossom[v]] == INNER:
                self.queue.append(v)
            self.inblossom[v] = b
        # least-slack edges from the new blossom to each neighbouring outer blossom
        best_to = [-1] * (2 * self.n)
        for bv in path:
            if self.bestedges[bv] is None:
                lists = [[p // 2 for p in self.neighbend[v]] for v in self.leaves(bv)]
            else:
                lists = [self.bestedges[bv]]
            for lst in lists:
                for k2 in lst:
                    i, j, _ = self.edges[k2]
                    if self.inblossom[j] == b:
                        i, j = j, i
                    bj = self.inblossom[j]
                    if (bj != b and self.label[bj] == OUTER
                            and (best_to[bj] == -1 or self.slack(k2) < self.slack(best_to[bj]))):
                        best_to[bj] = k2
            self.bestedges[bv] = None
            self.bestedge[bv] = -1
        self.bestedges[b] = [k2 for k2 in best_to if k2 != -1]
        self.bestedge[b] = -1
        for k2 in self.bestedges[b]:
            if self.bestedge[b] == -1 or self.slack(k2) < self.slack(self.bestedge[b]):
                self.bestedge[b] = k2

    def expand_blossom(self, b: int, endstage: bool):
        for s in self.childs[b]:
            self.parent[s] = -1
            if s < self.n:
                self.inblossom[s] = s
            elif endstage and self.dual[s] == 0:
                self.expand_blossom(s, endstage)
            else:
                for v in self.leaves(s):
                    self.inblossom[v] = s
        if not endstage and self.label[b] == INNER:
            # relabel the sub-blossoms along the even path from the entry child to the base
            entry = self.inblossom[self.endpoint[self.labelend[b] ^ 1]]
            childs, endps = self.childs[b], self.endps[b]
            j = childs.index(entry)
            if j & 1:
                j -= len(childs)
                jstep, trick = 1, 0
            else:
                jstep, trick = -1, 1
            p = self.labelend[b]
            while j != 0:
                self.label[self.endpoint[p ^ 1]] = FREE
                self.label[self.endpoint[endps[j - trick] ^ trick ^ 1]] = FREE
                self.assign_label(self.endpoint[p ^ 1], INNER, p)
                self.allowed[endps[j - trick] // 2] = True
                j += jstep
                p = endps[j - trick] ^ trick
                self.allowed[p // 2] = True
                j += jstep
            bv = childs[j]
            self.label[self.endpoint[p ^ 1]] = self.label[bv] = INNER
            self.labelend[self.endpoint[p ^ 1]] = self.labelend[bv] = p
            self.bestedge[bv] = -1
            j += jstep
            while childs[j] != entry:
                bv = childs[j]
                if self.label[bv] == OUTER:
                    j += jstep
                    continue
                reached = -1
                for v in self.leaves(bv):
                    if self.label[v] != FREE:
                        reached = v
                        break
                if reached != -1:
                    v = reached
                    self.label[v] = FREE
                    self.label[self.endpoint[self.mate[self.base[bv]]]] = FREE
                    self.assign_label(v, INNER, self.labelend[v])
                j += jstep
        self.label[b] = self.labelend[b] = -1
        self.childs[b] = self.endps[b] = None
        self.base[b] = -1
        self.bestedges[b] = None
        self.bestedge[b] = -1
        self.unused.append(b)

    def augment_blossom(self, b: int, v: int):
        """Rotate blossom ``b`` so that vertex ``v`` becomes its base, flipping the even path."""
        t = v
        while self.parent[t] != b:
            t = self.parent[t]
        if t >= self.n:
            self.augment_blossom(t, v)
        childs, endps = self.childs[b], self.endps[b]
        i = j = childs.index(t)
        if i & 1:
            j -= len(childs)
            jstep, trick = 1, 0
        else:
            jstep, trick = -1, 1
        while j != 0:
            j += jstep
            t = childs[j]
            p = endps[j - trick] ^ trick
            if t >= self.n:
                self.augment_blossom(t, self.endpoint[p])
            j += jstep
            t = childs[j]
            if t >= self.n:
                self.augment_blossom(t, self.endpoint[p ^ 1])
            self.mate[self.endpoint[p]] = p ^ 1
            self.mate[self.endpoint[p ^ 1]] = p
        self.childs[b] = childs[i:] + childs[:i]
        self.endps[b] = endps[i:] + endps[:i]
        self.base[b] = self.base[self.childs[b][0]]

    def augment_matching(self, k: int):
        v, w, _ = self.edges[k]
        for s, p in ((v, 2 * k + 1), (w, 2 * k)):
            while True:
                bs = self.inblossom[s]
                if bs >= self.n:
                    self.augment_blossom(bs, s)
                self.mate[s] = p
                if self.labelend[bs] == -1:
                    break
                t = self.endpoint[self.labelend[bs]]
                bt = self.inblossom[t]
                s = self.endpoint[self.labelend[bt]]
                j = self.endpoint[self.labelend[bt] ^ 1]
                if bt >= self.n:
                    self.augment_blossom(bt, j)
                self.mate[j] = self.labelend[bt]
                p = self.labelend[bt] ^ 1

    # -- main loop -------------------------------------------------------

    def stage(self) -> bool:
        """Grow trees until one augmentation happens; False when none is possible."""
        n = self.n
        self.label[:] = [FREE] * (2 * n)
        self.bestedge[:] = [-1] * (2 * n)
        self.bestedges[n:] = [None] * n
        self.allowed[:] = [False] * len(self.edges)
        self.queue[:] = []
        for v in range(n):
            if self.mate[v] == -1 and self.label[self.inblossom[v]] == FREE:
                self.assign_label(v, OUTER, -1)
        while True:
            while self.queue:
                v = self.queue.pop()
                for p in self.neighbend[v]:
                    k = p // 2
                    w = self.endpoint[p]
                    if self.inblossom[v] == self.inblossom[w]:
                        continue
                    kslack = None
                    if not self.allowed[k]:
                        kslack = self.slack(k)
                        if kslack <= 0:
                            self.allowed[k] = True
                    if self.allowed[k]:
                        lw = self.label[self.inblossom[w]]
                        if lw == FREE:
                            self.assign_label(w, INNER, p ^ 1)
                        elif lw == OUTER:
                            base = self.scan_blossom(v, w)
                            if base >= 0:
                                self.add_blossom(base, k)
                            else:
                                self.augment_matching(k)
                                return True
                        elif self.label[w] == FREE:
                            # w sits inside an inner blossom; remember how it was reached
                            self.label[w] = INNER
                            self.labelend[w] = p ^ 1
                    elif self.label[self.inblossom[w]] == OUTER:
                        b = self.inblossom[v]
                        if self.bestedge[b] == -1 or kslack < self.slack(self.bestedge[b]):
                            self.bestedge[b] = k
                    elif self.label[w] == FREE:
                        if self.bestedge[w] == -1 or kslack < self.slack(self.bestedge[w]):
                            self.bestedge[w] = k
            if not self.dual_update():
                return False

    def dual_update(self) -> bool:
        """Apply the largest safe dual change; False if the optimum has been reached."""
        n = self.n
        kind = -1
        delta = edge = blossom = None
        if not self.maxcardinality:
            kind, delta = 1, min(self.dual[:n])
        for v in range(n):
            if self.label[self.inblossom[v]] == FREE and self.bestedge[v] != -1:
                dd = self.slack(self.bestedge[v])
                if kind == -1 or dd < delta:
                    kind, delta, edge = 2, dd, self.bestedge[v]
        for b in range(2 * n):
            if self.parent[b] == -1 and self.label[b] == OUTER and self.bestedge[b] != -1:
                dd = self.slack(self.bestedge[b]) // 2
                if kind == -1 or dd < delta:
                    kind, delta, edge = 3, dd, self.bestedge[b]
        for b in range(n, 2 * n):
            if (self.base[b] >= 0 and self.parent[b] == -1 and self.label[b] == INNER
                    and (kind == -1 or self.dual[b] < delta)):
                kind, delta, blossom = 4, self.dual[b], b
        if kind == -1:
            # no further progress possible in max-cardinality mode
            kind, delta = 1, max(0, min(self.dual[:n]))
        for v in range(n):
            lb = self.label[self.inblossom[v]]
            if lb == OUTER:
                self.dual[v] -= delta
            elif lb == INNER:
                self.dual[v] += delta
        for b in range(n, 2 * n):
            if self.base[b] >= 0 and self.parent[b] == -1:
                if self.label[b] == OUTER:
                    self.dual[b] += delta
                elif self.label[b] == INNER:
                    self.dual[b] -= delta
        if kind == 1:
            return False
        if kind == 2:
            self.allowed[edge] = True
            i, j, _ = self.edges[edge]
            if self.label[self.inblossom[i]] == FREE:
                i, j = j, i
            self.queue.append(i)
        elif kind == 3:
            self.allowed[edge] = True
            i, _, _ = self.edges[edge]
            self.queue.append(i)
        else:
            self.expand_blossom(blossom, False)
        return True

    def run(self) -> list[int]:
        n = self.n
        for _ in range(n):
            if not self.stage():
                break
            # tight outer blossoms with zero dual can be dissolved between stages
            for b in range(n, 2 * n):
                if (self.parent[b] == -1 and self.base[b] >= 0 and self.label[b] == OUTER
                        and self.dual[b] == 0):
                    self.expand_blossom(b, True)
        return [self.endpoint[p] if p >= 0 else -1 for p in self.mate]


def max_weight_matching(n: int, edges: Iterable[tuple[int, int, int]],
                        maxcardinality: bool = False) -> list[int]:
    """Maximum-weight matching of an undirected graph with integer edge weights.

    Args:
        n: number of vertices.
        edges: ``(i, j, w)`` triples with ``i != j``.
        maxcardinality: if true, maximise weight only among maximum-cardinality matchings.

    Returns:
        ``mate`` list where ``mate[v]`` is the partner of ``v`` or -1.
    """
    edges = list(edges)
    for i, j, _ in edges:
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"invalid edge ({i}, {j}) for {n} vertices")
    if not edges:
        return [-1] * n
    return _Matcher(n, edges, maxcardinality).run()


def min_weight_perfect_matching(n: int, edges: Iterable[tuple[int, int, int]]) -> tuple[list[int], int]:
    """Minimum-weight perfect matching; raises ``ValueError`` if none exists.

    Negated weights are shifted to be positive and solved as a
    maximum-cardinality maximum-weight problem, which is equivalent because
    every perfect matching has exactly ``n/2`` edges.
    """
    edges = [(int(i), int(j), int(w)) for i, j, w in edges]
    if n == 0:
        return [], 0
    if n % 2:
        raise ValueError("perfect matching needs an even number of vertices")
    top = max(w for _, _, w in edges) + 1 if edges else 1
    # keep only the lightest of parallel edges
    best: dict[tuple[int, int], int] = {}
    for i, j, w in edges:
        key = (min(i, j), max(i, j))
        if key not in best or w < best[key]:
            best[key] = w
    flipped = [(i, j, top - w) for (i, j), w in sorted(best.items())]
    mate = max_weight_matching(n, flipped, maxcardinality=True)
    if any(v == -1 for v in mate):
        raise ValueError("graph has no perfect matching")
    total = sum(best[(min(v, mate[v]), max(v, mate[v]))] for v in range(n) if v < mate[v])
    return mate, total
