"""Spectral analysis of tropical matrices.

Cycle means, eigenvalues, eigenvector bases, critical graphs, cyclicity
and coupling (transient) indices, all on the precedence graph of a square
matrix.  Internals run on exact rationals so that criticality tests and
eigen-residuals are exact even when the cycle mean is not an integer.
Min-plus matrices are handled through negation duality: negating every
entry preserves the circuit structure and swaps minima for maxima.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .tropical import (
    MAXPLUS,
    MINPLUS,
    NEG_INF,
    POS_INF,
    UNIT,
    DimensionMismatch,
    Number,
    TropicalError,
    TropicalMatrix,
    is_finite,
    kleene_plus,
    mat_mul,
    mat_pow,
    negate,
    scale,
)


class NoCircuit(TropicalError):
    """The precedence graph is acyclic; there is no cycle mean."""


class NotIrreducible(TropicalError):
    """The precedence graph is not strongly connected."""


@dataclass(frozen=True)
class PrecedenceGraph:
    """Weighted digraph of a square matrix: entry A[i, j] != zero is an
    arc from node j to node i carrying weight A[i, j]."""

    node_count: int
    arcs: tuple[tuple[int, int, Number], ...]

    def successors(self) -> list[list[tuple[int, Number]]]:
        out: list[list[tuple[int, Number]]] = [[] for _ in range(self.node_count)]
        for src, dst, w in self.arcs:
            out[src].append((dst, w))
        return out


@dataclass(frozen=True)
class CriticalGraph:
    """Nodes and arcs lying on circuits of extremal mean weight."""

    nodes: tuple[int, ...]
    arcs: tuple[tuple[int, int], ...]
    components: tuple[tuple[int, ...], ...]
    cyclicities: tuple[int, ...]


@dataclass(frozen=True)
class SpectralReport:
    eigenvalue: Number
    eigenvectors: tuple[tuple[Number, ...], ...]
    cyclicity: int
    critical: CriticalGraph
    coupling_index: int | None
    irreducible: bool


def build_graph(a: TropicalMatrix) -> PrecedenceGraph:
    """Precedence graph of a square matrix; arcs at non-zero entries.

    Entries equal to the semiring top are rejected: an unbounded arc
    weight has no graph-theoretic reading and poisons every cycle mean.
    """
    if not a.is_square:
        raise DimensionMismatch("precedence graph of a non-square matrix")
    zero = a.tag.zero
    top = a.tag.top
    arcs = []
    for i in range(a.rows):
        for j in range(a.cols):
            v = a[i, j]
            if v == top:
                raise TropicalError(f"matrix has a top entry at ({i}, {j})")
            if v != zero:
                arcs.append((j, i, v))
    return PrecedenceGraph(a.rows, tuple(arcs))


def _sccs(n: int, succ: list[list[tuple[int, Number]]]) -> list[list[int]]:
    """Tarjan's strongly connected components, iterative."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    result: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while pi < len(succ[v]):
                w = succ[v][pi][0]
                pi += 1
                if index[w] == -1:
                    work[-1] = (v, pi)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                result.append(comp)
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return result


def is_irreducible(a: TropicalMatrix) -> bool:
    """True when the precedence graph is strongly connected."""
    g = build_graph(a)
    return len(_sccs(g.node_count, g.successors())) == 1


def _exact(v: Number) -> Number:
    """Finite payloads become Fractions; sentinels pass through."""
    if not is_finite(v):
        return v
    return Fraction(v)


def _simplify(v: Number) -> Number:
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def _karp(nodes: list[int], arcs: list[tuple[int, int, Number]]) -> Fraction | None:
    """Maximum cycle mean of one strongly connected subgraph.

    Classic dynamic program over walk lengths with every node as a
    source: F[k][v] is the best weight of a k-arc walk ending in v, and
    the answer is max over v of min over k of (F[n][v] - F[k][v]) / (n - k).
    """
    n = len(nodes)
    if n == 0:
        return None
    remap = {node: idx for idx, node in enumerate(nodes)}
    local = [(remap[s], remap[d], _exact(w)) for (s, d, w) in arcs]
    if not local:
        return None
    F: list[list[Number]] = [[Fraction(0)] * n]
    for k in range(1, n + 1):
        prev = F[k - 1]
        cur: list[Number] = [NEG_INF] * n
        for s, d, w in local:
            if prev[s] == NEG_INF:
                continue
            v = prev[s] + w
            if cur[d] == NEG_INF or v > cur[d]:
                cur[d] = v
        F.append(cur)
    best: Fraction | None = None
    for v in range(n):
        if F[n][v] == NEG_INF:
            continue
        worst: Fraction | None = None
        for k in range(n):
            if F[k][v] == NEG_INF:
                continue
            mean = Fraction(F[n][v] - F[k][v], n - k)
            if worst is None or mean < worst:
                worst = mean
        if worst is not None and (best is None or worst > best):
            best = worst
    return best


def max_cycle_mean(a: TropicalMatrix) -> Number | None:
    """Maximum mean weight over the circuits of the precedence graph.

    Computed by Karp's algorithm per strongly connected component and
    maximized over components; None when the graph is acyclic.
    """
    if a.tag is not MAXPLUS:
        raise TropicalError("max_cycle_mean expects a max-plus matrix")
    g = build_graph(a)
    succ = g.successors()
    best: Fraction | None = None
    for comp in _sccs(g.node_count, succ):
        inside = set(comp)
        arcs = [(s, d, w) for (s, d, w) in g.arcs if s in inside and d in inside]
        mean = _karp(comp, arcs)
        if mean is not None and (best is None or mean > best):
            best = mean
    return _simplify(best) if best is not None else None


def min_cycle_mean(b: TropicalMatrix) -> Number | None:
    """Minimal circuit mean of a min-plus matrix, via negation duality."""
    if b.tag is not MINPLUS:
        raise TropicalError("min_cycle_mean expects a min-plus matrix")
    rho = max_cycle_mean(negate(b))
    return None if rho is None else _simplify(-rho)


def _exact_matrix(a: TropicalMatrix) -> TropicalMatrix:
    return TropicalMatrix(a.rows, a.cols, a.tag, tuple(_exact(v) for v in a.entries))


def _normalized_plus(a: TropicalMatrix, rho: Number) -> TropicalMatrix:
    """Exact plus-closure of the matrix normalized by its cycle mean."""
    shifted = scale(_exact_matrix(a), -Fraction(rho))
    return kleene_plus(shifted)


def critical_graph(a: TropicalMatrix) -> CriticalGraph:
    """Critical nodes, arcs and components of a max-plus matrix.

    After normalizing by the maximum cycle mean, node i is critical when
    the plus-closure has 0 at (i, i), and arc j->i is critical when the
    normalized weight of the arc plus the best return path closes a
    zero-weight circuit.
    """
    rho = max_cycle_mean(a)
    if rho is None:
        raise NoCircuit("matrix has an acyclic precedence graph")
    shifted = scale(_exact_matrix(a), -Fraction(rho))
    closure = kleene_plus(shifted)
    n = a.rows
    nodes = tuple(i for i in range(n) if closure[i, i] == UNIT)
    node_set = set(nodes)
    arcs = []
    for i in range(n):
        for j in range(n):
            if i not in node_set or j not in node_set:
                continue
            w = shifted[i, j]
            if not is_finite(w):
                continue
            back = UNIT if i == j else closure[j, i]
            if is_finite(back) and w + back == UNIT:
                arcs.append((j, i))
    comp_succ: list[list[tuple[int, Number]]] = [[] for _ in range(n)]
    arc_set = set(arcs)
    for s, d in arcs:
        comp_succ[s].append((d, 0))
    comps = [
        sorted(c)
        for c in _sccs(n, comp_succ)
        if set(c) <= node_set and (len(c) > 1 or (c[0], c[0]) in arc_set)
    ]
    comps.sort()
    cyclicities = tuple(_component_cyclicity(c, arcs) for c in comps)
    return CriticalGraph(nodes, tuple(sorted(arcs)), tuple(tuple(c) for c in comps), cyclicities)


def _component_cyclicity(component: Sequence[int], arcs: Sequence[tuple[int, int]]) -> int:
    """Gcd of the circuit lengths inside one strongly connected component,
    computed from search-level differences along its arcs."""
    inside = set(component)
    succ: dict[int, list[int]] = {v: [] for v in component}
    for s, d in arcs:
        if s in inside and d in inside:
            succ[s].append(d)
    root = component[0]
    level = {root: 0}
    queue = [root]
    g = 0
    while queue:
        v = queue.pop()
        for w in succ[v]:
            if w in level:
                g = gcd(g, abs(level[v] + 1 - level[w]))
            else:
                level[w] = level[v] + 1
                queue.append(w)
    return g if g > 0 else 1


def cyclicity(a: TropicalMatrix) -> int:
    """Lcm over critical components of the gcd of their circuit lengths.

    Min-plus input is handled through its negation dual, which has the
    same critical structure.
    """
    if a.tag is MINPLUS:
        return cyclicity(negate(a))
    return lcm(*critical_graph(a).cyclicities)


def eigenvectors(a: TropicalMatrix) -> list[tuple[Number, ...]]:
    """Basis of the eigenspace of an irreducible max-plus matrix.

    Columns of the normalized plus-closure with unit diagonal, pruned so
    that no column is a tropical multiple of an earlier one.  Every
    returned vector v satisfies a (x) v = rho (x) v exactly.
    """
    if a.tag is not MAXPLUS:
        raise TropicalError("eigenvectors expects a max-plus matrix; see min_eigenvectors")
    if not is_irreducible(a):
        raise NotIrreducible("eigenvector basis needs a strongly connected graph")
    rho = max_cycle_mean(a)
    if rho is None:
        raise NoCircuit("matrix has an acyclic precedence graph")
    closure = _normalized_plus(a, rho)
    basis: list[tuple[Number, ...]] = []
    for j in range(a.rows):
        if closure[j, j] != UNIT:
            continue
        col = tuple(_simplify(v) for v in closure.col(j))
        if not any(_proportional(col, kept) for kept in basis):
            basis.append(col)
    return basis


def _proportional(u: Sequence[Number], v: Sequence[Number]) -> bool:
    """Tropical proportionality: equal sentinel patterns and a constant
    finite difference."""
    diff: Number | None = None
    for x, y in zip(u, v):
        xf, yf = is_finite(x), is_finite(y)
        if xf != yf:
            return False
        if not xf:
            if x != y:
                return False
            continue
        d = x - y
        if diff is None:
            diff = d
        elif d != diff:
            return False
    return True


def min_eigenvectors(b: TropicalMatrix) -> list[tuple[Number, ...]]:
    """Eigenvector basis of an irreducible min-plus matrix.

    Duality: v is a min-plus eigenvector of b exactly when its negation
    is a max-plus eigenvector of the negated matrix.
    """
    if b.tag is not MINPLUS:
        raise TropicalError("min_eigenvectors expects a min-plus matrix")
    duals = eigenvectors(negate(b))
    return [_negate_vector(v) for v in duals]


def _negate_vector(v: Sequence[Number]) -> tuple[Number, ...]:
    return tuple(
        POS_INF if x == NEG_INF else NEG_INF if x == POS_INF else _simplify(-x) for x in v
    )


def periodic_eigenvectors(a: TropicalMatrix, p: int) -> list[tuple[Number, ...]]:
    """Finite eigenvectors of a^p for the eigenvalue p * rho(a).

    Phase starts for p-periodic regimes.  The p-th power of a p-cyclic
    matrix is reducible in general, so the usual critical-column
    characterization does not apply directly; candidate columns of the
    normalized closure are kept only when they are finite everywhere and
    satisfy the eigen equation exactly.
    """
    if a.tag is MINPLUS:
        return [_negate_vector(v) for v in periodic_eigenvectors(negate(a), p)]
    rho = max_cycle_mean(a)
    if rho is None:
        raise NoCircuit("matrix has an acyclic precedence graph")
    power = mat_pow(_exact_matrix(a), p)
    shifted = scale(power, -p * Fraction(rho))
    closure = kleene_plus(shifted)
    out: list[tuple[Number, ...]] = []
    for j in range(a.rows):
        if closure[j, j] != UNIT:
            continue
        col_matrix = TropicalMatrix.column(closure.col(j), MAXPLUS)
        if any(not is_finite(v) for v in col_matrix.entries):
            continue
        if mat_mul(shifted, col_matrix).entries != col_matrix.entries:
            continue
        col = tuple(_simplify(v) for v in col_matrix.entries)
        if not any(_proportional(col, kept) for kept in out):
            out.append(col)
    return out


def coupling_index(a: TropicalMatrix, cap: int | None = None) -> int | None:
    """Smallest N with a^(N+c) = rho^c (x) a^N, c the cyclicity.

    Searched by bounded iteration; None when no such N <= cap exists.
    The default cap is 10 d^2 for dimension d.
    """
    if a.tag is MINPLUS:
        return coupling_index(negate(a), cap)
    rho = max_cycle_mean(a)
    if rho is None:
        raise NoCircuit("coupling index undefined for acyclic matrices")
    c = cyclicity(a)
    if cap is None:
        cap = 10 * a.rows * a.rows
    exact = _exact_matrix(a)
    step = mat_pow(exact, c)
    shift = Fraction(rho) * c
    power = TropicalMatrix.identity(a.rows, a.tag)
    for n in range(cap + 1):
        if mat_mul(power, step).entries == scale(power, shift).entries:
            return n
        power = mat_mul(power, exact)
    return None


def spectral_report(a: TropicalMatrix, coupling_cap: int | None = None) -> SpectralReport:
    """Full spectral summary for a square matrix of either tag."""
    if a.tag is MINPLUS:
        dual = spectral_report(negate(a), coupling_cap)
        vectors = tuple(
            tuple(POS_INF if x == NEG_INF else NEG_INF if x == POS_INF else _simplify(-x) for x in v)
            for v in dual.eigenvectors
        )
        return SpectralReport(
            eigenvalue=_simplify(-Fraction(dual.eigenvalue)),
            eigenvectors=vectors,
            cyclicity=dual.cyclicity,
            critical=dual.critical,
            coupling_index=dual.coupling_index,
            irreducible=dual.irreducible,
        )
    irr = is_irreducible(a)
    rho = max_cycle_mean(a)
    if rho is None:
        raise NoCircuit("spectral report needs at least one circuit")
    crit = critical_graph(a)
    vectors = tuple(eigenvectors(a)) if irr else ()
    return SpectralReport(
        eigenvalue=rho,
        eigenvectors=vectors,
        cyclicity=lcm(*crit.cyclicities),
        critical=crit,
        coupling_index=coupling_index(a, coupling_cap) if irr else None,
        irreducible=irr,
    )
