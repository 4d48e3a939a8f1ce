"""Digraph containers and the structural predicates used throughout.

Vertices are ``0..n-1`` in memory. The text format (``parse_digraph`` /
``format_digraph``) is 1-based: a header line ``"n m"`` followed by ``m``
lines ``"i j"`` for the arc ``i -> j``.

Sink-sets are closed under out-arcs, source-sets under in-arcs. Since no arc
leaves a sink-set ``S``, the number of arcs induced by ``S`` is simply the sum
of the out-degrees over ``S``; several routines below lean on that.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .errors import GuardError

MAX_EXHAUSTIVE_N = 24


@dataclass(frozen=True)
class Digraph:
    """Simple digraph: no loops, no repeated arcs."""

    n: int
    arcs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        arcs = frozenset((int(i), int(j)) for i, j in self.arcs)
        for i, j in arcs:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"arc {(i, j)} has an endpoint outside 0..{self.n - 1}")
            if i == j:
                raise ValueError(f"loop at vertex {i} in a simple digraph")
        object.__setattr__(self, "arcs", arcs)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def out_degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, _ in self.arcs:
            deg[i] += 1
        return deg

    def in_degrees(self) -> list[int]:
        deg = [0] * self.n
        for _, j in self.arcs:
            deg[j] += 1
        return deg

    def reversed(self) -> "Digraph":
        return Digraph(self.n, frozenset((j, i) for i, j in self.arcs))

    def arc_list(self) -> list[tuple[int, int]]:
        return sorted(self.arcs)


@dataclass(frozen=True)
class MultiDigraph:
    """Directed multigraph; loops and repeated arcs allowed.

    ``arcs`` is stored sorted, so two multigraphs compare equal exactly when
    their arc multisets agree.
    """

    n: int
    arcs: tuple = ()

    def __post_init__(self):
        arcs = tuple(sorted((int(i), int(j)) for i, j in self.arcs))
        for i, j in arcs:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"arc {(i, j)} has an endpoint outside 0..{self.n - 1}")
        object.__setattr__(self, "arcs", arcs)

    @property
    def m(self) -> int:
        return len(self.arcs)

    def out_degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, _ in self.arcs:
            deg[i] += 1
        return deg

    def in_degrees(self) -> list[int]:
        deg = [0] * self.n
        for _, j in self.arcs:
            deg[j] += 1
        return deg

    def reversed(self) -> "MultiDigraph":
        return MultiDigraph(self.n, tuple((j, i) for i, j in self.arcs))

    def arc_list(self) -> list[tuple[int, int]]:
        return list(self.arcs)

    def is_simple(self) -> bool:
        if any(i == j for i, j in self.arcs):
            return False
        return len(set(self.arcs)) == len(self.arcs)

    def to_digraph(self) -> Digraph:
        if not self.is_simple():
            raise ValueError("multigraph has loops or repeated arcs")
        return Digraph(self.n, frozenset(self.arcs))


AnyDigraph = Union[Digraph, MultiDigraph]


@dataclass(frozen=True)
class DegreeSequencePair:
    """In-degrees ``delta`` and out-degrees ``Delta`` with a common sum ``m``."""

    delta: tuple
    Delta: tuple

    def __post_init__(self):
        delta = tuple(int(d) for d in self.delta)
        Delta = tuple(int(d) for d in self.Delta)
        if len(delta) != len(Delta):
            raise ValueError("in- and out-degree sequences have different lengths")
        if any(d < 0 for d in delta + Delta):
            raise ValueError("negative degree")
        if sum(delta) != sum(Delta):
            raise ValueError(f"degree sums differ: {sum(delta)} != {sum(Delta)}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "Delta", Delta)

    @property
    def n(self) -> int:
        return len(self.delta)

    @property
    def m(self) -> int:
        return sum(self.delta)


# ---------------------------------------------------------------------------
# adjacency helpers
# ---------------------------------------------------------------------------


def _successors(g: AnyDigraph) -> list[list[int]]:
    succ: list[list[int]] = [[] for _ in range(g.n)]
    for i, j in g.arc_list():
        succ[i].append(j)
    return succ


def _out_masks(g: AnyDigraph) -> list[int]:
    masks = [0] * g.n
    for i, j in g.arc_list():
        masks[i] |= 1 << j
    return masks


def _in_masks(g: AnyDigraph) -> list[int]:
    masks = [0] * g.n
    for i, j in g.arc_list():
        masks[j] |= 1 << i
    return masks


def mask_to_set(mask: int) -> frozenset:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


# ---------------------------------------------------------------------------
# strong connectivity
# ---------------------------------------------------------------------------


def strongly_connected_components(g: AnyDigraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative. Components come out in reverse topological
    order of the condensation, so sink components appear first."""
    succ = _successors(g)
    n = g.n
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, pos = work[-1]
            if pos < len(succ[v]):
                work[-1] = (v, pos + 1)
                w = succ[v][pos]
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
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
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


def is_strongly_connected(g: AnyDigraph, method: str = "scc") -> bool:
    """``method="scc"`` uses Tarjan; ``method="sink_sets"`` checks that there is
    no proper sink-set and no proper source-set (exhaustive, ``n <= 24``)."""
    if method == "scc":
        return len(strongly_connected_components(g)) == 1
    if method == "sink_sets":
        return not find_sink_sets(g, proper_only=True) and not find_source_sets(g, proper_only=True)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# exhaustive sink/source-set enumeration
# ---------------------------------------------------------------------------


def _closed_masks(n: int, nbr_masks: list[int], proper_only: bool) -> np.ndarray:
    """All non-empty vertex masks closed under the given neighbourhoods."""
    if n > MAX_EXHAUSTIVE_N:
        raise GuardError(f"exhaustive subset enumeration refuses n={n} > {MAX_EXHAUSTIVE_N}")
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bad = np.zeros(masks.shape, dtype=bool)
    for v in range(n):
        leak = nbr_masks[v] & ~masks
        bad |= ((masks >> v) & 1).astype(bool) & (leak != 0)
    out = masks[~bad]
    if proper_only:
        out = out[out != (1 << n) - 1]
    return out


def sink_set_masks(g: AnyDigraph, proper_only: bool = True) -> np.ndarray:
    return _closed_masks(g.n, _out_masks(g), proper_only)


def source_set_masks(g: AnyDigraph, proper_only: bool = True) -> np.ndarray:
    return _closed_masks(g.n, _in_masks(g), proper_only)


def find_sink_sets(g: AnyDigraph, proper_only: bool = True) -> list[frozenset]:
    """Every non-empty ``S`` with no arc leaving it (``[n]`` excluded when
    ``proper_only``). Exhaustive over subsets, so ``n <= 24``."""
    return [mask_to_set(int(s)) for s in sink_set_masks(g, proper_only)]


def find_source_sets(g: AnyDigraph, proper_only: bool = True) -> list[frozenset]:
    return [mask_to_set(int(s)) for s in source_set_masks(g, proper_only)]


# ---------------------------------------------------------------------------
# simple sink/source-sets and isolated cycles
# ---------------------------------------------------------------------------


def _functional_cycles(n: int, nxt: list[int]) -> list[frozenset]:
    """Cycles of the partial map ``v -> nxt[v]`` (``-1`` means undefined)."""
    state = [0] * n  # 0 unvisited, 1 on current path, 2 done
    cycles = []
    for start in range(n):
        if state[start] or nxt[start] < 0:
            continue
        path = []
        v = start
        while v >= 0 and state[v] == 0:
            state[v] = 1
            path.append(v)
            v = nxt[v]
        if v >= 0 and state[v] == 1:
            cycles.append(frozenset(path[path.index(v):]))
        for u in path:
            state[u] = 2
    return sorted(cycles, key=min)


def find_simple_sink_sets(g: AnyDigraph) -> list[frozenset]:
    """Minimal simple sink-sets in linear time.

    Only vertices of out-degree exactly 1 can lie in a simple sink-set; the
    cycles of the map sending such a vertex to the head of its unique out-arc
    are exactly the minimal simple sink-sets. A loop is a cycle of length 1.
    """
    outdeg = g.out_degrees()
    nxt = [-1] * g.n
    for i, j in g.arc_list():
        if outdeg[i] == 1:
            nxt[i] = j
    for v in range(g.n):
        if nxt[v] >= 0 and outdeg[nxt[v]] != 1:
            nxt[v] = -1
    return _functional_cycles(g.n, nxt)


def find_simple_source_sets(g: AnyDigraph) -> list[frozenset]:
    return find_simple_sink_sets(g.reversed())


def simple_sink_sets_exhaustive(g: AnyDigraph) -> list[frozenset]:
    """Reference implementation of ``find_simple_sink_sets`` by subset search:
    sink-sets whose vertices all have out-degree 1, keeping the minimal ones."""
    outdeg = g.out_degrees()
    ones = 0
    for v in range(g.n):
        if outdeg[v] == 1:
            ones |= 1 << v
    cands = [int(s) for s in sink_set_masks(g, proper_only=False) if int(s) & ~ones == 0]
    minimal = [s for s in cands if not any(t != s and t & s == t for t in cands)]
    return sorted((mask_to_set(s) for s in minimal), key=min)


def simple_source_sets_exhaustive(g: AnyDigraph) -> list[frozenset]:
    return simple_sink_sets_exhaustive(g.reversed())


def isolated_cycles(g: AnyDigraph) -> list[frozenset]:
    """Vertex sets inducing a directed cycle with no other arc touching them."""
    outdeg = g.out_degrees()
    indeg = g.in_degrees()
    nxt = [-1] * g.n
    for i, j in g.arc_list():
        if outdeg[i] == 1 and indeg[i] == 1 and outdeg[j] == 1 and indeg[j] == 1:
            nxt[i] = j
    return _functional_cycles(g.n, nxt)


def has_isolated_cycle(g: Digraph) -> bool:
    return bool(isolated_cycles(g))


def has_simple_sink_or_source(g: AnyDigraph) -> bool:
    return bool(find_simple_sink_sets(g)) or bool(find_simple_source_sets(g))


def simple_ss_cycle_length(g: AnyDigraph) -> int:
    """Number of vertices covered by cycles of simple sink- and source-sets.

    A sink cycle and a source cycle that meet coincide, so this is the total
    length of the distinct cycles (an isolated cycle counts once).
    """
    covered: set[int] = set()
    for c in find_simple_sink_sets(g):
        covered |= c
    for c in find_simple_source_sets(g):
        covered |= c
    return len(covered)


# ---------------------------------------------------------------------------
# the event "complex sink-set with few arcs, but no simple sink-set"
# ---------------------------------------------------------------------------


def _arc_threshold_ok(arcs: int, m: int, strict: bool) -> bool:
    return 2 * arcs < m if strict else 2 * arcs <= m


def check_event_A(
    g: Digraph,
    include_full: bool = False,
    strict: bool = False,
    method: str = "scc",
) -> bool:
    """True iff ``g`` has a complex sink-set inducing at most ``m/2`` arcs
    (fewer than ``m/2`` when ``strict``) and no simple sink-set.

    ``include_full`` lets ``[n]`` itself count as a sink-set. It never changes
    the answer for ``m >= 1`` because ``[n]`` induces all ``m`` arcs.

    ``method="scc"``: with no simple sink-set every sink-set is complex, every
    sink-set contains a terminal strong component, and induced arcs grow with
    the set, so only terminal components need checking. ``method="subsets"``
    enumerates all sink-sets (``n <= 24``) and serves as the reference.
    """
    if method == "subsets":
        if g.n > MAX_EXHAUSTIVE_N:
            raise GuardError(f"exhaustive event check refuses n={g.n} > {MAX_EXHAUSTIVE_N}")
        sinks = sink_set_masks(g, proper_only=not include_full)
        outdeg = np.array(g.out_degrees(), dtype=np.int64)
        found_simple = False
        found_small_complex = False
        for s in sinks:
            members = [v for v in range(g.n) if (int(s) >> v) & 1]
            degs = outdeg[members]
            if np.all(degs == 1):
                found_simple = True
                break
            if _arc_threshold_ok(int(degs.sum()), g.m, strict):
                found_small_complex = True
        if not include_full and not found_simple:
            # [n] is a sink-set too; simple iff every out-degree is 1.
            found_simple = bool(np.all(outdeg == 1)) and g.n > 0
        return found_small_complex and not found_simple
    if method != "scc":
        raise ValueError(f"unknown method {method!r}")
    if find_simple_sink_sets(g):
        return False
    outdeg = g.out_degrees()
    comps = strongly_connected_components(g)
    comp_of = [0] * g.n
    for c, members in enumerate(comps):
        for v in members:
            comp_of[v] = c
    terminal = [True] * len(comps)
    for i, j in g.arcs:
        if comp_of[i] != comp_of[j]:
            terminal[comp_of[i]] = False
    for c, members in enumerate(comps):
        if not terminal[c]:
            continue
        if len(members) == g.n and not include_full:
            continue
        if _arc_threshold_ok(sum(outdeg[v] for v in members), g.m, strict):
            return True
    return False


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def parse_digraph(text: str, multi: bool = False) -> AnyDigraph:
    """Parse the ``"n m"`` + ``m`` lines of ``"i j"`` (1-based) format."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty digraph text")
    n, m = (int(x) for x in lines[0])
    body = lines[1:]
    if len(body) != m:
        raise ValueError(f"header promises {m} arcs, found {len(body)}")
    arcs = [(int(a) - 1, int(b) - 1) for a, b in body]
    if multi:
        return MultiDigraph(n, tuple(arcs))
    if len(set(arcs)) != len(arcs):
        raise ValueError("repeated arc in a simple digraph (use multi=True)")
    return Digraph(n, frozenset(arcs))


def format_digraph(g: AnyDigraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{i + 1} {j + 1}" for i, j in g.arc_list())
    return "\n".join(lines) + "\n"


def read_digraph(path, multi: bool = False) -> AnyDigraph:
    with open(path) as fh:
        return parse_digraph(fh.read(), multi=multi)


def degree_pair(g: AnyDigraph) -> DegreeSequencePair:
    return DegreeSequencePair(tuple(g.in_degrees()), tuple(g.out_degrees()))


def arc_multiplicities(g: MultiDigraph) -> Counter:
    return Counter(g.arcs)


def digraph_from_arcs(n: int, arcs: Iterable[tuple[int, int]]) -> Digraph:
    return Digraph(n, frozenset(arcs))
