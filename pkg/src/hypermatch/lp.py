"""Exact rational linear programming for fractional matchings and covers.

One simplex solve (dense tableau, Fraction arithmetic, Bland's anti-cycling
rule) yields both optima: the fractional matching from the primal basis and
the fractional vertex cover from the reduced costs of the slack columns.
Both witnesses are re-verified feasible by direct exact arithmetic before
being returned, so equal values certify optimality of both via weak duality
independently of the pivoting path.

Also: the cyclic-window perfect fractional matching of complete graphs, the
weight-closure hypergraph of a vertex weighting, and weight-sorted vertex
relabeling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .core import EdgeT, KGraph
from .errors import InternalContradictionError, InvalidQueryError

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class FractionalAssignment:
    """Edge weights phi in [0,1] with every vertex load at most 1.

    Validated on construction: support must lie in the host's edge set and
    loads are checked exactly. "Perfect" means the total weight is n/k, which
    forces every vertex load to equal 1.
    """

    host: KGraph
    phi: Mapping[EdgeT, Fraction]

    def __post_init__(self):
        loads: dict[int, Fraction] = {}
        for e, val in self.phi.items():
            if e not in self.host.edge_set:
                raise InvalidQueryError(f"support edge {e} is not a host edge")
            if not 0 <= val <= 1:
                raise InvalidQueryError(f"phi({e}) = {val} outside [0, 1]")
            for v in e:
                loads[v] = loads.get(v, ZERO) + val
        bad = {v: l for v, l in loads.items() if l > 1}
        if bad:
            raise InvalidQueryError(f"vertex loads exceed 1: {bad}")

    def value(self) -> Fraction:
        return sum(self.phi.values(), ZERO)

    def load(self, v: int) -> Fraction:
        return sum((val for e, val in self.phi.items() if v in e), ZERO)

    def loads(self) -> dict[int, Fraction]:
        out = {v: ZERO for v in self.host.vertices()}
        for e, val in self.phi.items():
            for v in e:
                out[v] += val
        return out

    def is_perfect(self) -> bool:
        return self.value() == Fraction(self.host.n, self.host.k)

    def support(self) -> tuple[EdgeT, ...]:
        return tuple(sorted(e for e, val in self.phi.items() if val > 0))


@dataclass(frozen=True)
class VertexWeights:
    """Vertex weights in [0,1]; weights[v-1] is the weight of vertex v."""

    weights: tuple[Fraction, ...]
    host: KGraph | None = field(default=None, compare=False)

    def __post_init__(self):
        if any(not 0 <= w <= 1 for w in self.weights):
            raise InvalidQueryError("vertex weights must lie in [0, 1]")

    def __getitem__(self, v: int) -> Fraction:
        return self.weights[v - 1]

    @property
    def n(self) -> int:
        return len(self.weights)

    def total(self) -> Fraction:
        return sum(self.weights, ZERO)

    def is_cover_of(self, H: KGraph) -> bool:
        return all(sum(self.weights[v - 1] for v in e) >= 1 for e in H.edges)

    def is_sorted_nonincreasing(self) -> bool:
        return all(self.weights[i] >= self.weights[i + 1] for i in range(len(self.weights) - 1))


def _solve_incidence_lp(H: KGraph) -> tuple[Fraction, dict[EdgeT, Fraction], tuple[Fraction, ...]]:
    """Maximize total edge weight subject to unit vertex loads.

    Revised simplex with an explicit basis inverse: the constraint matrix is
    a 0/1 incidence matrix with k ones per edge column, so reduced costs are
    priced in O(k) per column and only the m x m inverse is updated per
    pivot. The slack basis is feasible (all right-hand sides are 1), so no
    phase 1 is needed. Deterministic: Bland's rule (lowest eligible column;
    ratio ties broken by lowest basic variable) over the canonical edge
    order, edges first, then slacks.
    """
    m = H.n
    ncols = len(H.edges)
    # edge columns as 0-based row index tuples
    cols = [tuple(v - 1 for v in e) for e in H.edges]
    binv = [[ZERO] * m for _ in range(m)]
    for i in range(m):
        binv[i][i] = ONE
    xb = [ONE] * m
    basis = list(range(ncols, ncols + m))  # slack of row i has index ncols + i
    edge_basic = [False] * m  # whether basis[i] is an edge column (cost 1)

    while True:
        # y = cB^T Binv, skipping zero-cost (slack) basis rows
        y = [ZERO] * m
        for i in range(m):
            if edge_basic[i]:
                row = binv[i]
                for t in range(m):
                    if row[t]:
                        y[t] += row[t]
        # Bland pricing: first column with positive reduced cost
        enter = None
        enter_rows: tuple[int, ...] = ()
        for j in range(ncols):
            rc = ONE
            for t in cols[j]:
                rc -= y[t]
            if rc > 0:
                enter, enter_rows = j, cols[j]
                break
        if enter is None:
            for i in range(m):
                if -y[i] > 0:
                    enter, enter_rows = ncols + i, (i,)
                    break
        if enter is None:
            break
        # direction d = Binv A_enter
        d = [ZERO] * m
        for t in enter_rows:
            for i in range(m):
                if binv[i][t]:
                    d[i] += binv[i][t]
        leave = None
        best_ratio = None
        for i in range(m):
            if d[i] > 0:
                ratio = xb[i] / d[i]
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave is None:
            raise InternalContradictionError("packing LP reported unbounded", check="lp-bounded")
        piv = d[leave]
        if piv != 1:
            inv = ONE / piv
            binv[leave] = [x * inv for x in binv[leave]]
            xb[leave] *= inv
        prow = binv[leave]
        pval = xb[leave]
        for i in range(m):
            if i == leave:
                continue
            f = d[i]
            if f:
                row = binv[i]
                row[:] = [a if not b else a - f * b for a, b in zip(row, prow)]
                if pval:
                    xb[i] -= f * pval
        basis[leave] = enter
        edge_basic[leave] = enter < ncols

    value = sum((xb[i] for i in range(m) if edge_basic[i]), ZERO)
    phi = {H.edges[basis[i]]: xb[i] for i in range(m) if edge_basic[i]}
    # optimal duals: y = cB^T Binv with the final basis
    y = [ZERO] * m
    for i in range(m):
        if edge_basic[i]:
            row = binv[i]
            for t in range(m):
                if row[t]:
                    y[t] += row[t]
    return value, phi, tuple(y)


def max_fractional_matching(H: KGraph) -> tuple[Fraction, FractionalAssignment]:
    """Exact optimum fractional matching with a verified witness."""
    value, phi, _ = _solve_incidence_lp(H)
    assignment = FractionalAssignment(H, phi)  # validates loads <= 1 exactly
    if assignment.value() != value:
        raise InternalContradictionError(
            "primal witness value disagrees with simplex objective", check="lp-primal-value"
        )
    return value, assignment


def min_fractional_cover(H: KGraph) -> tuple[Fraction, VertexWeights]:
    """Exact optimum fractional vertex cover with a verified witness.

    The witness comes from the dual side of the matching LP; its feasibility
    (every edge weighted to at least 1, weights in [0,1]) and its value are
    re-verified exactly, which certifies optimality by weak duality.
    """
    value, _, duals = _solve_incidence_lp(H)
    w = VertexWeights(duals, host=H)
    if not w.is_cover_of(H):
        raise InternalContradictionError(
            "extracted dual vector is not a fractional cover", check="lp-dual-feasible"
        )
    if w.total() != value:
        raise InternalContradictionError(
            "cover value disagrees with simplex objective", check="lp-dual-value"
        )
    return w.total(), w


def check_duality(H: KGraph) -> bool:
    """True iff the exact matching and cover optima coincide.

    Strong duality guarantees this for every input; a False (or an exception
    from witness verification) indicates an implementation bug, never a
    property of the graph.
    """
    nu_frac, _ = max_fractional_matching(H)
    tau_frac, _ = min_fractional_cover(H)
    return nu_frac == tau_frac


def clique_window_matching(n: int, k: int) -> FractionalAssignment:
    """Weight 1/k on the n cyclic windows {i, ..., i+k-1} (mod n) of K_n^k.

    Every vertex lies in exactly k windows, so all loads are 1 and the value
    is n/k: a perfect fractional matching of the complete k-graph.
    """
    if n <= k:
        raise InvalidQueryError(f"need n > k, got n={n}, k={k}")
    from .constructions import complete

    host = complete(n, k)
    wk = Fraction(1, k)
    phi = {}
    for i in range(n):
        window = tuple(sorted((i + j) % n + 1 for j in range(k)))
        phi[window] = wk
    return FractionalAssignment(host, phi)


def weight_closure(n_total: int, k: int, w: VertexWeights) -> KGraph:
    """All k-sets of 1..n_total whose weights sum to at least 1, exactly."""
    if w.n != n_total:
        raise InvalidQueryError(f"weights cover {w.n} vertices, expected {n_total}")
    weights = w.weights
    edges = [
        e for e in combinations(range(1, n_total + 1), k) if sum(weights[v - 1] for v in e) >= 1
    ]
    return KGraph._from_sorted(n_total, k, edges)


def relabel_by_weights(H: KGraph, w: VertexWeights) -> tuple[KGraph, tuple[int, ...]]:
    """Rename vertices so weights are non-increasing; ties keep index order.

    Returns the relabeled graph and the permutation as a tuple p with
    p[old_vertex - 1] = new_label. After relabeling, the weight closure of
    the permuted weights is stable.
    """
    if w.n != H.n:
        raise InvalidQueryError(f"weights cover {w.n} vertices, expected {H.n}")
    order = sorted(H.vertices(), key=lambda v: (-w[v], v))
    old_to_new = [0] * H.n
    for new_label, old in enumerate(order, start=1):
        old_to_new[old - 1] = new_label
    edges = [tuple(sorted(old_to_new[v - 1] for v in e)) for e in H.edges]
    return KGraph._from_sorted(H.n, H.k, sorted(edges)), tuple(old_to_new)


def permute_weights(w: VertexWeights, old_to_new: tuple[int, ...]) -> VertexWeights:
    """Weights seen through a relabeling: new vertex p[v-1] gets v's weight."""
    out = [ZERO] * len(old_to_new)
    for old, new in enumerate(old_to_new, start=1):
        out[new - 1] = w[old]
    return VertexWeights(tuple(out), host=w.host)
