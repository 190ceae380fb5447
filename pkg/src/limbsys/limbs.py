"""Numbered limb systems: alternating graphs and antigraphs over a partition.

A system carries partial maps f_1, f_2, ... where odd-indexed maps send row
points to column points (their graphs are support cells) and even-indexed
maps send column points to row points (antigraphs).  Row points are
partitioned among the odd index sets I_1, I_3, ..., column points among the
even ones I_0, I_2, ..., with Dom(f_k) inside I_k and Ran(f_k) inside
I_{k-1}.  On finite spaces every acyclic support decomposes into such a
system, and a system together with marginals pins down at most one coupling,
recovered here by the backward recursion over limbs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CyclicSupportError, InvalidSystemError, ShapeMismatchError
from .extremality import SupportGraph, is_acyclic
from .measures import (
    DEFAULT_TOL,
    Coupling,
    DiscreteMarginal,
    ToleranceConfig,
    marginals_of,
    pushforward_antigraph,
    pushforward_graph,
    validate_coupling,
)

__all__ = [
    "Limb",
    "NumberedLimbSystem",
    "ReconstructionReport",
    "validate_system",
    "system_violations",
    "system_support",
    "system_from_two_limbs",
    "decompose",
    "reconstruct",
    "limb_count",
    "two_limb_check",
]


@dataclass(frozen=True)
class Limb:
    """One limb: index k, its kind, and the map as (source, image) pairs.

    Odd k is a graph limb (map on row points), even k an antigraph limb
    (map on column points).  The map must be single-valued on its domain.
    """

    k: int
    kind: str
    pairs: tuple

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("limb indices start at 1")
        if self.kind not in ("graph", "antigraph"):
            raise ValueError(f"unknown limb kind {self.kind!r}")
        if (self.k % 2 == 1) != (self.kind == "graph"):
            raise ValueError(f"limb {self.k} parity does not match kind {self.kind!r}")
        pairs = tuple(sorted((int(s), int(d)) for s, d in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        sources = [s for s, _ in pairs]
        if len(set(sources)) != len(sources):
            raise ValueError(f"limb {self.k} map is not single-valued")

    def domain(self) -> frozenset:
        return frozenset(s for s, _ in self.pairs)

    def image(self) -> frozenset:
        return frozenset(d for _, d in self.pairs)

    def cells(self) -> frozenset:
        """Support cells on the product grid, as (row, column) pairs."""
        if self.kind == "graph":
            return frozenset((s, d) for s, d in self.pairs)
        return frozenset((d, s) for s, d in self.pairs)


@dataclass(frozen=True)
class NumberedLimbSystem:
    """Limbs with strictly increasing indices plus the index-set partition.

    ``x_levels[i]`` is the odd index of the I-set holding row point i,
    ``y_levels[j]`` the even index holding column point j.  Construction
    checks only structural sanity; the containment and disjointness clauses
    are checked by :func:`validate_system`, which reports rather than raises
    so that invalid systems can be described.
    """

    m: int
    n: int
    limbs: tuple
    x_levels: tuple
    y_levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "limbs", tuple(self.limbs))
        object.__setattr__(self, "x_levels", tuple(int(v) for v in self.x_levels))
        object.__setattr__(self, "y_levels", tuple(int(v) for v in self.y_levels))
        if self.m <= 0 or self.n <= 0:
            raise ValueError("system dimensions must be positive")
        if len(self.x_levels) != self.m or len(self.y_levels) != self.n:
            raise ValueError("level arrays must assign every row and column point")
        for i, lv in enumerate(self.x_levels):
            if lv < 1 or lv % 2 == 0:
                raise ValueError(f"row point {i} must sit in an odd index set, got {lv}")
        for j, lv in enumerate(self.y_levels):
            if lv < 0 or lv % 2 == 1:
                raise ValueError(f"column point {j} must sit in an even index set, got {lv}")
        ks = [limb.k for limb in self.limbs]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("limb indices must be strictly increasing")

    def limb_at(self, k: int) -> Optional[Limb]:
        for limb in self.limbs:
            if limb.k == k:
                return limb
        return None


@dataclass(frozen=True)
class ReconstructionReport:
    """Outcome of the backward recursion: the candidate coupling, the limb
    marginals eta_k in ascending k order, and whether it is feasible."""

    coupling: Coupling
    eta: tuple
    feasible: bool
    message: Optional[str] = None


def system_violations(system: NumberedLimbSystem) -> list:
    """Every violated clause of the limb-system definition, as messages."""
    out = []
    seen_cells: dict = {}
    for limb in system.limbs:
        src_size = system.m if limb.kind == "graph" else system.n
        dst_size = system.n if limb.kind == "graph" else system.m
        for s, d in limb.pairs:
            if not (0 <= s < src_size) or not (0 <= d < dst_size):
                out.append(f"limb {limb.k}: pair ({s}, {d}) out of bounds")
                continue
            src_level = system.x_levels[s] if limb.kind == "graph" else system.y_levels[s]
            dst_level = system.y_levels[d] if limb.kind == "graph" else system.x_levels[d]
            if src_level != limb.k:
                out.append(
                    f"limb {limb.k}: domain point {s} sits in I_{src_level}, not I_{limb.k}"
                )
            if dst_level != limb.k - 1:
                out.append(
                    f"limb {limb.k}: image point {d} sits in I_{dst_level}, not I_{limb.k - 1}"
                )
        for cell in limb.cells():
            if cell in seen_cells:
                out.append(
                    f"cell {cell} belongs to limbs {seen_cells[cell]} and {limb.k}; "
                    "limb supports must be disjoint"
                )
            else:
                seen_cells[cell] = limb.k
    return out


def validate_system(system: NumberedLimbSystem) -> bool:
    return not system_violations(system)


def system_support(system: NumberedLimbSystem) -> SupportGraph:
    """Union of all limb supports as a bipartite graph."""
    cells = set()
    for limb in system.limbs:
        cells |= limb.cells()
    return SupportGraph(system.m, system.n, frozenset(cells))


def limb_count(system: NumberedLimbSystem) -> int:
    """Largest k whose map has nonempty domain; 0 for an empty system."""
    ks = [limb.k for limb in system.limbs if limb.pairs]
    return max(ks) if ks else 0


def decompose(support: SupportGraph) -> NumberedLimbSystem:
    """Level an acyclic support into limbs by rooted breadth-first search.

    Each tree of the forest is rooted at its column node of highest degree
    (ties to the lowest index); a node at BFS depth d contributes its parent
    edge to limb d, and joins index set I_d.  Points without support edges
    go to I_1 (rows) and I_0 (columns).  Cyclic input raises, carrying the
    cycle witness.
    """
    acyclic, witness = is_acyclic(support)
    if not acyclic:
        raise CyclicSupportError("support contains an alternating cycle", witness)

    m, n = support.m, support.n
    adjacency = {v: [] for v in range(m + n)}
    degree_col = [0] * n
    for i, j in support.sorted_edges():
        adjacency[i].append(m + j)
        adjacency[m + j].append(i)
        degree_col[j] += 1

    x_levels = [1] * m
    y_levels = [0] * n
    limb_pairs: dict = {}
    visited = [False] * (m + n)

    for j in sorted(range(n), key=lambda jj: (-degree_col[jj], jj)):
        root = m + j
        if visited[root] or degree_col[j] == 0:
            continue
        visited[root] = True
        frontier = [(root, 0)]
        while frontier:
            nxt = []
            for node, depth in frontier:
                for nb in sorted(adjacency[node]):
                    if visited[nb]:
                        continue
                    visited[nb] = True
                    d = depth + 1
                    if nb < m:
                        x_levels[nb] = d
                        limb_pairs.setdefault(d, []).append((nb, node - m))
                    else:
                        y_levels[nb - m] = d
                        limb_pairs.setdefault(d, []).append((nb - m, node))
                    nxt.append((nb, d))
            frontier = nxt

    limbs = tuple(
        Limb(k, "graph" if k % 2 == 1 else "antigraph", tuple(limb_pairs[k]))
        for k in sorted(limb_pairs)
    )
    return NumberedLimbSystem(m, n, limbs, tuple(x_levels), tuple(y_levels))


def _as_map_array(limb: Limb, size: int) -> list:
    arr: list = [None] * size
    for s, d in limb.pairs:
        arr[s] = d
    return arr


def reconstruct(
    system: NumberedLimbSystem,
    mu: DiscreteMarginal,
    nu: DiscreteMarginal,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> ReconstructionReport:
    """Recover the unique coupling a limb system admits, if any.

    Working from the highest limb down, each limb takes whatever marginal
    mass the limbs above it left behind on its domain:

        eta_k = (mu - row marginal of gamma_{k+1}) restricted to Dom f_k   (k odd)
        eta_k = (nu - column marginal of gamma_{k+1}) restricted to Dom f_k (k even)

    and pushes it through its map.  A negative eta entry below -eps_mass, or
    a final marginal mismatch, makes the report infeasible; small negative
    round-off is clamped to zero.  When feasible, the sum of the limb pieces
    is the one coupling of (mu, nu) vanishing outside the system support.
    """
    violations = system_violations(system)
    if violations:
        raise InvalidSystemError("limb system is invalid", violations)
    if (system.m, system.n) != (mu.size, nu.size):
        raise ShapeMismatchError(
            f"system is {system.m}x{system.n} but marginals have sizes {mu.size} and {nu.size}"
        )

    m, n = system.m, system.n
    eps = tol.eps_mass
    exact = not any(isinstance(w, float) for w in mu.weights + nu.weights)
    cutoff = 0 if exact else -eps

    gamma_above: Optional[Coupling] = None  # gamma_{k+1}, None meaning zero
    k_above: Optional[int] = None
    pieces = []
    etas: dict = {}
    failure: Optional[str] = None

    for limb in sorted(system.limbs, key=lambda l: -l.k):
        odd = limb.k % 2 == 1
        base = mu.weights if odd else nu.weights
        size = m if odd else n
        leftover = list(base)
        if gamma_above is not None and k_above == limb.k + 1:
            row_marg, col_marg = marginals_of(gamma_above)
            proj = row_marg.weights if odd else col_marg.weights
            leftover = [a - b for a, b in zip(leftover, proj)]
        weights = [0] * size
        for s in limb.domain():
            w = leftover[s]
            if w < cutoff:
                if failure is None:
                    failure = (
                        f"limb {limb.k} needs mass {w!r} at point {s}; "
                        "the marginals cannot feed this system"
                    )
                w = 0
            elif w < 0:
                w = 0
            weights[s] = w
        eta = DiscreteMarginal(tuple(weights))
        etas[limb.k] = eta
        if odd:
            piece = pushforward_graph(_as_map_array(limb, m), eta, n, tol)
        else:
            piece = pushforward_antigraph(_as_map_array(limb, n), eta, m, tol)
        pieces.append(piece)
        gamma_above, k_above = piece, limb.k

    entries = [entry for piece in pieces for entry in piece.entries]
    coupling = Coupling.from_entries(m, n, entries)
    feasible = failure is None and validate_coupling(coupling, mu, nu, tol)
    if failure is None and not feasible:
        failure = "reconstructed coupling does not reproduce the requested marginals"
    return ReconstructionReport(
        coupling,
        tuple(etas[k] for k in sorted(etas)),
        feasible,
        failure,
    )


def two_limb_check(support: SupportGraph):
    """Maps (f1, f2) realizing the support as graph plus antigraph, or None.

    Columns meeting two or more support cells can only be ranges of the
    first map, so they all join I_0; the support is representable with two
    limbs exactly when no row sends two cells into that set.  Degree-one
    columns whose cell is also its row's only cell join I_0 as graph cells;
    every other occupied column keeps its single cell as an antigraph cell.
    Returned as index arrays with None off the domains.
    """
    m, n = support.m, support.n
    col_rows: dict = {j: [] for j in range(n)}
    row_cols: dict = {i: [] for i in range(m)}
    for i, j in support.sorted_edges():
        col_rows[j].append(i)
        row_cols[i].append(j)

    heavy = {j for j in range(n) if len(col_rows[j]) >= 2}
    for i in range(m):
        if sum(1 for j in row_cols[i] if j in heavy) > 1:
            return None

    in_i0 = set(heavy)
    for j in range(n):
        if len(col_rows[j]) == 1 and len(row_cols[col_rows[j][0]]) == 1:
            in_i0.add(j)

    f1: list = [None] * m
    f2: list = [None] * n
    for i in range(m):
        targets = [j for j in row_cols[i] if j in in_i0]
        if len(targets) > 1:
            return None
        if targets:
            f1[i] = targets[0]
    for j in range(n):
        if j in in_i0 or not col_rows[j]:
            continue
        f2[j] = col_rows[j][0]

    covered = {(i, f1[i]) for i in range(m) if f1[i] is not None}
    covered |= {(f2[j], j) for j in range(n) if f2[j] is not None}
    if covered != support.edges:
        return None
    return tuple(f1), tuple(f2)


def system_from_two_limbs(m: int, n: int, f1, f2) -> NumberedLimbSystem:
    """Package a pair of maps as a two-limb system: all rows in I_1, domain
    columns of the second map in I_2, every other column in I_0."""
    pairs1 = tuple((i, j) for i, j in enumerate(f1) if j is not None)
    pairs2 = tuple((j, i) for j, i in enumerate(f2) if i is not None)
    limbs = []
    if pairs1:
        limbs.append(Limb(1, "graph", pairs1))
    if pairs2:
        limbs.append(Limb(2, "antigraph", pairs2))
    y_levels = tuple(2 if f2[j] is not None else 0 for j in range(n))
    return NumberedLimbSystem(m, n, tuple(limbs), (1,) * m, y_levels)
