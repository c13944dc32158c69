"""Sparse bipartite graph construction for LDGM quantizers and LDPC
syndrome formers, plus the compound pairing used by both coding schemes.

Graphs are sampled by permutation-based socket matching with a seeded
generator; duplicate edges within a factor are repaired by socket swaps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .binmath import binary_entropy

DUPLICATE_RETRY_CAP = 100
FRACTION_TOL = 1e-9


class GraphConstructionError(ValueError):
    """Degree budget inconsistent or duplicate-edge repair failed."""


@dataclass(frozen=True)
class DegreeDistribution:
    """Node-perspective degree distributions for the two sides of a graph.

    Each side is a mapping {degree: fraction}.  A side left as None is
    filled with as-uniform-as-possible degrees matching the other side's
    edge budget.
    """

    var: dict[int, float] | None = None
    fac: dict[int, float] | None = None

    def __post_init__(self) -> None:
        for name, side in (("var", self.var), ("fac", self.fac)):
            if side is None:
                continue
            if not side:
                raise GraphConstructionError(f"{name} side is empty")
            if any(d < 1 or d != int(d) for d in side):
                raise GraphConstructionError(f"{name} degrees must be integers >= 1")
            total = sum(side.values())
            if abs(total - 1.0) > FRACTION_TOL:
                raise GraphConstructionError(
                    f"{name} fractions sum to {total}, expected 1"
                )
        if self.var is None and self.fac is None:
            raise GraphConstructionError("at least one side must be specified")

    @classmethod
    def regular(cls, var_deg: int | None, fac_deg: int | None) -> "DegreeDistribution":
        var = {var_deg: 1.0} if var_deg is not None else None
        fac = {fac_deg: 1.0} if fac_deg is not None else None
        return cls(var=var, fac=fac)


def _apportion(dist: dict[int, float], count: int) -> np.ndarray:
    """Per-node degrees realizing the fractions by largest remainder."""
    degs = sorted(dist)
    exact = np.array([dist[d] * count for d in degs])
    base = np.floor(exact).astype(int)
    short = count - base.sum()
    order = np.argsort(-(exact - base), kind="stable")
    base[order[:short]] += 1
    return np.repeat(degs, base)


def _balanced(total_edges: int, count: int) -> np.ndarray:
    base = total_edges // count
    degrees = np.full(count, base, dtype=int)
    degrees[: total_edges - base * count] += 1
    if base == 0:
        raise GraphConstructionError("fewer edges than nodes on the balanced side")
    return degrees


def _repair_edge_total(degrees: np.ndarray, target: int) -> np.ndarray:
    """Adjust node degrees by at most +-1 each to hit the edge total."""
    degrees = degrees.copy()
    diff = target - degrees.sum()
    if diff == 0:
        return degrees
    if abs(diff) > len(degrees):
        raise GraphConstructionError(
            f"degree budgets differ by {abs(diff)} edges; +-1 repair cannot close it"
        )
    step = 1 if diff > 0 else -1
    # Walk nodes from the end so low-index nodes keep their nominal degree.
    idx = len(degrees) - 1
    while diff != 0 and idx >= 0:
        if step < 0 and degrees[idx] <= 1:
            idx -= 1
            continue
        degrees[idx] += step
        diff -= step
        idx -= 1
    if diff != 0:
        raise GraphConstructionError("repair failed: not enough adjustable nodes")
    return degrees


@dataclass(frozen=True)
class SparseBipartiteGraph:
    n_var: int
    n_fac: int
    factor_adj: tuple[np.ndarray, ...]
    _edges: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_edges(self) -> int:
        return int(sum(len(a) for a in self.factor_adj))

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat (edge -> factor, edge -> variable) index arrays, cached."""
        if "fac" not in self._edges:
            fac = np.repeat(
                np.arange(self.n_fac), [len(a) for a in self.factor_adj]
            )
            var = (
                np.concatenate(self.factor_adj)
                if self.factor_adj
                else np.empty(0, dtype=int)
            )
            self._edges["fac"] = fac.astype(np.int64)
            self._edges["var"] = var.astype(np.int64)
        return self._edges["fac"], self._edges["var"]

    def factor_parity(self, bits: np.ndarray) -> np.ndarray:
        """Mod-2 sum of bits over each factor's neighborhood."""
        bits = np.asarray(bits)
        if bits.shape != (self.n_var,):
            raise ValueError(f"bit length {bits.shape} does not match n_var={self.n_var}")
        fac, var = self.edge_arrays()
        sums = np.bincount(fac, weights=bits[var].astype(float), minlength=self.n_fac)
        return (sums.astype(np.int64) % 2).astype(np.uint8)

    def to_text(self) -> str:
        """One factor per line, space-separated variable indices."""
        return "\n".join(" ".join(map(str, adj)) for adj in self.factor_adj) + "\n"

    @classmethod
    def from_text(cls, text: str, n_var: int) -> "SparseBipartiteGraph":
        adj = tuple(
            np.array([int(t) for t in line.split()], dtype=np.int64)
            for line in text.strip("\n").split("\n")
        )
        return cls(n_var=n_var, n_fac=len(adj), factor_adj=adj)


def sample_graph(
    dist: DegreeDistribution, n_var: int, n_fac: int, seed: int
) -> SparseBipartiteGraph:
    """Sample a simple bipartite graph realizing the degree distribution.

    Deterministic for a fixed (dist, n_var, n_fac, seed).  Degrees are off
    by at most one per node when the two sides' edge budgets disagree.
    """
    if n_var < 1 or n_fac < 1:
        raise GraphConstructionError("n_var and n_fac must be positive")
    rng = np.random.default_rng(seed)
    var_degs = _apportion(dist.var, n_var) if dist.var is not None else None
    fac_degs = _apportion(dist.fac, n_fac) if dist.fac is not None else None
    if var_degs is None:
        var_degs = _balanced(int(fac_degs.sum()), n_var)
    elif fac_degs is None:
        fac_degs = _balanced(int(var_degs.sum()), n_fac)
    elif var_degs.sum() != fac_degs.sum():
        fac_degs = _repair_edge_total(fac_degs, int(var_degs.sum()))
    if fac_degs.max() > n_var:
        raise GraphConstructionError("a factor degree exceeds the variable count")

    sockets = rng.permutation(np.repeat(np.arange(n_var), var_degs))
    ptr = np.concatenate([[0], np.cumsum(fac_degs)])
    factors = [sockets[ptr[i] : ptr[i + 1]].copy() for i in range(n_fac)]

    # Duplicate repair: swap an offending socket with a random socket of
    # another factor, accepting only swaps that create no new duplicates.
    for i, adj in enumerate(factors):
        tries = 0
        while len(np.unique(adj)) != len(adj):
            if tries >= DUPLICATE_RETRY_CAP:
                raise GraphConstructionError(
                    f"duplicate repair exhausted {DUPLICATE_RETRY_CAP} tries at factor {i}"
                )
            tries += 1
            vals, counts = np.unique(adj, return_counts=True)
            dup_val = vals[counts > 1][0]
            pos = int(np.flatnonzero(adj == dup_val)[0])
            j = int(rng.integers(n_fac))
            if j == i or len(factors[j]) == 0:
                continue
            q = int(rng.integers(len(factors[j])))
            other = factors[j]
            if other[q] == dup_val or other[q] in adj or dup_val in np.delete(other, q):
                continue
            adj[pos], other[q] = other[q], adj[pos]
    return SparseBipartiteGraph(
        n_var=n_var,
        n_fac=n_fac,
        factor_adj=tuple(np.sort(a) for a in factors),
    )


@dataclass(frozen=True)
class LdgmCode:
    """Generator-side code: n_fac output bits, n_var information bits."""

    graph: SparseBipartiteGraph

    @property
    def k(self) -> int:
        return self.graph.n_var

    @property
    def n(self) -> int:
        return self.graph.n_fac

    @property
    def rate(self) -> float:
        return self.k / self.n

    def encode(self, info_bits: np.ndarray) -> np.ndarray:
        """Output bit i is the mod-2 sum of its adjacent information bits."""
        return self.graph.factor_parity(info_bits)


@dataclass(frozen=True)
class LdpcCode:
    """Parity-side code: n_var codeword bits, n_fac checks."""

    graph: SparseBipartiteGraph

    @property
    def n(self) -> int:
        return self.graph.n_var

    @property
    def m(self) -> int:
        return self.graph.n_fac

    def syndrome(self, u: np.ndarray) -> np.ndarray:
        return self.graph.factor_parity(u)


@dataclass(frozen=True)
class CompoundCode:
    """An LDGM quantizer and an LDPC syndrome former over the same block."""

    ldgm: LdgmCode
    ldpc: LdpcCode

    def __post_init__(self) -> None:
        if self.ldgm.n != self.ldpc.n:
            raise GraphConstructionError(
                f"block length mismatch: LDGM n={self.ldgm.n}, LDPC n={self.ldpc.n}"
            )

    @property
    def n(self) -> int:
        return self.ldgm.n

    @property
    def transmitted_rate(self) -> float:
        return self.ldpc.m / self.n


# Default ensembles for the nested construction below.  The LDGM mixed
# outputs are regular degree-4: low enough for messages to survive the
# tanh shrinkage at the receiver, high enough for competitive quantizer
# distortion.  The LDPC side is dominated by degree-2 checks, which form
# a percolating backbone along which exactly-known bits spread, with a
# high-degree tail for rate efficiency; a fraction of degree-1 ("doped")
# checks seeds that percolation.  A doped check's syndrome bit reveals
# one information bit outright and is paid for in the transmitted rate
# m/n like any other check.
DEFAULT_LDGM_FAC_DIST = {4: 1.0}
DEFAULT_LDPC_FAC_DIST = {2: 0.6, 3: 0.2, 6: 0.2}
DOPED_CHECK_FRACTION = 0.10

# Anchor (triangular) construction defaults: number of peeling levels and
# the factor degree of the non-seed checks.
ANCHOR_LEVELS = 80
ANCHOR_REF_DEGREE = 4


def default_ldgm_dist() -> DegreeDistribution:
    return DegreeDistribution(var=None, fac=dict(DEFAULT_LDGM_FAC_DIST))


def default_ldpc_dist() -> DegreeDistribution:
    return DegreeDistribution(var=None, fac=dict(DEFAULT_LDPC_FAC_DIST))


def _systematic_ldgm(
    n: int,
    k: int,
    mixed_pool: int,
    ldgm_dist: DegreeDistribution,
    seed: int,
) -> LdgmCode:
    """LDGM with outputs 0..k-1 systematic and the rest mixed.

    Output i < k copies information bit i; outputs k..n-1 draw their
    neighborhoods from the first mixed_pool information bits only.
    """
    mixed = sample_graph(ldgm_dist, n_var=mixed_pool, n_fac=n - k, seed=seed)
    adj = tuple(
        [np.array([j], dtype=np.int64) for j in range(k)]
        + list(mixed.factor_adj)
    )
    return LdgmCode(
        graph=SparseBipartiteGraph(n_var=k, n_fac=n, factor_adj=adj)
    )


def build_compound(
    n: int,
    ldgm_rate: float,
    syndrome_rate: float,
    ldgm_dist: DegreeDistribution | None = None,
    ldpc_dist: DegreeDistribution | None = None,
    seed: int = 0,
    doped_fraction: float = DOPED_CHECK_FRACTION,
) -> CompoundCode:
    """Build a nested LDGM/LDPC pair over one block with rate bookkeeping.

    k = round(n * ldgm_rate) information bits, m = round(n * syndrome_rate)
    checks; transmitted_rate = m / n.  The LDGM is systematic on the first
    k outputs and the LDPC checks live entirely on those systematic
    positions, so the syndrome is a sparse linear functional of the
    information bits themselves.  This nesting is what makes the syndrome
    decodable by belief propagation under the weak pairwise correlation of
    this problem; checks placed on arbitrary codeword positions have no
    workable BP basin there.
    """
    if not 0.0 < ldgm_rate <= 1.0:
        raise GraphConstructionError(f"ldgm_rate must be in (0, 1], got {ldgm_rate}")
    if not 0.0 < syndrome_rate < 1.0:
        raise GraphConstructionError(
            f"syndrome_rate must be in (0, 1), got {syndrome_rate}"
        )
    if not 0.0 <= doped_fraction < 1.0:
        raise GraphConstructionError(
            f"doped_fraction must be in [0, 1), got {doped_fraction}"
        )
    k = round(n * ldgm_rate)
    m = round(n * syndrome_rate)
    if k < 1 or m < 1 or m >= n or k >= n:
        raise GraphConstructionError(f"degenerate code sizes: n={n}, k={k}, m={m}")
    ldgm_dist = ldgm_dist if ldgm_dist is not None else default_ldgm_dist()
    ldpc_dist = ldpc_dist if ldpc_dist is not None else default_ldpc_dist()
    sub = np.random.SeedSequence(seed).generate_state(3)
    ldgm = _systematic_ldgm(n, k, k, ldgm_dist, seed=int(sub[0]))

    n_doped = int(round(doped_fraction * m))
    rng = np.random.default_rng(int(sub[1]))
    doped = rng.choice(k, size=n_doped, replace=False) if n_doped else np.empty(0, int)
    plain = sample_graph(ldpc_dist, n_var=k, n_fac=m - n_doped, seed=int(sub[2]))
    ldpc_adj = tuple(
        [np.array([int(j)], dtype=np.int64) for j in doped]
        + list(plain.factor_adj)
    )
    ldpc = LdpcCode(
        graph=SparseBipartiteGraph(n_var=n, n_fac=m, factor_adj=ldpc_adj)
    )
    return CompoundCode(ldgm=ldgm, ldpc=ldpc)


def build_anchor_compound(
    n: int,
    ldgm_rate: float,
    gamma_fraction: float,
    ldgm_dist: DegreeDistribution | None = None,
    seed: int = 0,
    levels: int = ANCHOR_LEVELS,
    ref_degree: int = ANCHOR_REF_DEGREE,
) -> CompoundCode:
    """Compound code for the joint scheme's anchoring link.

    The LDPC part is a triangular system over the systematic positions:
    check i constrains information bit i plus references into strictly
    earlier peeling levels, so flooding BP resolves the first k - gamma
    bits exactly, one level per iteration, with no side information.  The
    last gamma = round(gamma_fraction * n) information bits carry no
    checks at all and appear only in their own systematic output; the
    receiver recovers them solely through the cross-link correlation.
    That gamma/n rate saving below the lossless point is the joint
    scheme's structural advantage over successive decoding.
    """
    if not 0.0 < ldgm_rate <= 1.0:
        raise GraphConstructionError(f"ldgm_rate must be in (0, 1], got {ldgm_rate}")
    if not 0.0 <= gamma_fraction < ldgm_rate:
        raise GraphConstructionError(
            f"gamma_fraction must be in [0, ldgm_rate), got {gamma_fraction}"
        )
    k = round(n * ldgm_rate)
    gamma = round(n * gamma_fraction)
    m = k - gamma
    if k < 1 or m < 1 or k >= n:
        raise GraphConstructionError(f"degenerate code sizes: n={n}, k={k}, m={m}")
    ldgm_dist = ldgm_dist if ldgm_dist is not None else default_ldgm_dist()
    sub = np.random.SeedSequence(seed).generate_state(2)
    # Mixed outputs draw from the checked prefix only: a wrong suffix
    # guess then corrupts exactly one output symbol instead of fanning out.
    ldgm = _systematic_ldgm(n, k, m, ldgm_dist, seed=int(sub[0]))

    rng = np.random.default_rng(int(sub[1]))
    lev_size = -(-m // max(levels, 1))
    adjs = []
    for i in range(m):
        lev = i // lev_size
        if lev == 0:
            adjs.append(np.array([i], dtype=np.int64))
        else:
            lo = lev * lev_size
            refs = rng.choice(lo, size=min(ref_degree - 1, lo), replace=False)
            adjs.append(np.sort(np.concatenate(([i], refs))).astype(np.int64))
    ldpc = LdpcCode(
        graph=SparseBipartiteGraph(n_var=n, n_fac=m, factor_adj=tuple(adjs))
    )
    return CompoundCode(ldgm=ldgm, ldpc=ldpc)


def design_rates(
    p1: float, p2: float, d1: float, d2: float, ldgm_margin: float, syndrome_margin: float
) -> tuple[float, float, float, float]:
    """(ldgm_rate_1, ldgm_rate_2, syndrome_rate_1, syndrome_rate_2).

    Quantizer rates are (1 - h_b(d_i)) scaled up by the LDGM margin;
    syndrome rates are the closed-form per-link rate targets
    h_b(p*d) - h_b(d_i) scaled up by the syndrome margin.
    """
    from .binmath import binary_convolution as conv

    h_pd = binary_entropy(conv(conv(p1, p2), conv(d1, d2)))
    g1 = (1.0 - binary_entropy(d1)) * (1.0 + ldgm_margin)
    g2 = (1.0 - binary_entropy(d2)) * (1.0 + ldgm_margin)
    s1 = (h_pd - binary_entropy(d1)) * (1.0 + syndrome_margin)
    s2 = (h_pd - binary_entropy(d2)) * (1.0 + syndrome_margin)
    return g1, g2, s1, s2
