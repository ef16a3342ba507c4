"""Graph model and exact partition-function evaluation for two-spin systems.

Every vertex takes a spin in {0, 1}.  An edge (u, v) contributes
``A[s_u][s_v]`` with ``A = [[beta, 1], [1, gamma]]``; a vertex v contributes
its field when ``s_v = 0`` and 1 otherwise.  The partition function is the
sum over all 2^n configurations of the product of these factors.  Graphs are
multigraphs: parallel edges multiply, and a self-loop on v contributes beta
(spin 0) or gamma (spin 1) per loop.

Evaluation is exhaustive, so it is the ground truth that the recursive gadget
evaluation and every reduction certificate are checked against.  Two paths:

* float inputs run vectorised in log space (chunked, fixed summation order,
  deterministic), comfortable up to the default 24-vertex limit;
* Fraction/Quad inputs run a depth-first exact sum with shared partial
  products, so identities can be verified with no rounding at all.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Optional

import numpy as np

from .errors import CapacityError, DomainError
from .exact import Quad

ENUM_LIMIT = 24
_CHUNK = 1 << 16

#: Partial spin assignment: vertex id -> spin in {0, 1}.
PinAssignment = Mapping[str, int]


def _positive(x) -> bool:
    return x > 0


@dataclass(frozen=True)
class SpinParams:
    """Edge interaction pair (beta, gamma) and uniform external field mu.

    beta weighs (0,0) edges, gamma weighs (1,1) edges, mixed edges weigh 1.
    mu is the a-priori weight of spin 0 on a free vertex.  The regime is
    ferromagnetic for beta*gamma > 1 and antiferromagnetic below 1.
    """

    beta: object
    gamma: object
    mu: object

    def __post_init__(self):
        if self.beta < 0 or self.gamma < 0:
            raise DomainError("beta and gamma must be non-negative")
        if not _positive(self.mu):
            raise DomainError("mu must be positive")

    @property
    def regime(self) -> str:
        bg = self.beta * self.gamma
        if bg > 1:
            return "ferromagnetic"
        if bg < 1:
            return "antiferromagnetic"
        return "degenerate"


@dataclass(frozen=True)
class FieldedGraph:
    """Multigraph with per-vertex external fields and an optional output vertex.

    ``vertices`` is a tuple of (id, field) pairs; ``edges`` a tuple of
    unordered id pairs, with u == v allowed (self-loop) and repeats allowed
    (parallel edges).  Construction accepts a mapping or iterable of pairs
    for vertices and any iterable of pairs for edges.
    """

    vertices: tuple
    edges: tuple
    output: Optional[str] = None

    def __post_init__(self):
        verts = self.vertices
        if isinstance(verts, Mapping):
            verts = tuple(verts.items())
        else:
            verts = tuple((v, f) for v, f in verts)
        edges = tuple((u, v) for u, v in self.edges)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)

        seen = set()
        for v, f in verts:
            if v in seen:
                raise DomainError(f"duplicate vertex id {v!r}")
            seen.add(v)
            if not _positive(f):
                raise DomainError(f"field of vertex {v!r} must be strictly positive")
        for u, v in edges:
            if u not in seen or v not in seen:
                raise DomainError(f"edge ({u!r}, {v!r}) uses an undeclared vertex")
        if self.output is not None and self.output not in seen:
            raise DomainError(f"output vertex {self.output!r} is not declared")

    @cached_property
    def field_map(self) -> dict:
        return dict(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def degree(self, v: str) -> int:
        """Degree of v; a self-loop counts twice."""
        d = 0
        for a, b in self.edges:
            if a == v:
                d += 1
            if b == v:
                d += 1
        return d

    def degrees(self) -> dict:
        d = {v: 0 for v, _ in self.vertices}
        for a, b in self.edges:
            d[a] += 1
            d[b] += 1
        return d

    def with_fields(self, fields: Mapping) -> "FieldedGraph":
        """Copy with the given vertex fields replaced."""
        new = tuple((v, fields.get(v, f)) for v, f in self.vertices)
        return FieldedGraph(new, self.edges, self.output)

    def relabeled(self, mapping: Mapping[str, str]) -> "FieldedGraph":
        verts = tuple((mapping[v], f) for v, f in self.vertices)
        edges = tuple((mapping[u], mapping[v]) for u, v in self.edges)
        out = mapping[self.output] if self.output is not None else None
        return FieldedGraph(verts, edges, out)


def _validate(graph: FieldedGraph, pins: PinAssignment, limit: int) -> None:
    if graph.n > limit:
        raise CapacityError(
            f"graph has {graph.n} vertices, enumeration limit is {limit}")
    for v, s in pins.items():
        if v not in graph.field_map:
            raise DomainError(f"pinned vertex {v!r} is not in the graph")
        if s not in (0, 1):
            raise DomainError(f"pin for {v!r} must be 0 or 1, got {s!r}")


def _wants_exact(graph: FieldedGraph, params: SpinParams) -> bool:
    values = [params.beta, params.gamma] + [f for _, f in graph.vertices]
    return any(isinstance(x, (Fraction, Quad)) for x in values)


def _log_partition_float(graph: FieldedGraph, params: SpinParams,
                         pins: PinAssignment) -> float:
    """log Z on the vectorised float path; -inf when Z == 0."""
    n = graph.n
    beta, gamma = float(params.beta), float(params.gamma)
    pos = {v: i for i, (v, _) in enumerate(graph.vertices)}
    logf = np.array([math.log(float(f)) for _, f in graph.vertices], dtype=float)
    fixed = {pos[v]: s for v, s in pins.items()}
    free = [i for i in range(n) if i not in fixed]
    edge_counts = Counter((pos[u], pos[v]) for u, v in graph.edges)

    log_beta = math.log(beta) if beta > 0 else None
    log_gamma = math.log(gamma) if gamma > 0 else None

    chunk_lses = []
    total_configs = 1 << len(free)
    for start in range(0, total_configs, _CHUNK):
        count = min(_CHUNK, total_configs - start)
        idx = np.arange(start, start + count, dtype=np.int64)
        spins = np.zeros((count, max(n, 1)), dtype=np.uint8)
        for j, vi in enumerate(free):
            spins[:, vi] = (idx >> j) & 1
        for vi, s in fixed.items():
            spins[:, vi] = s
        zero = spins == 0
        logw = zero[:, :n].astype(float) @ logf if n else np.zeros(count)
        cnt00 = np.zeros(count)
        cnt11 = np.zeros(count)
        for (ui, vi), mult in edge_counts.items():
            cnt00 += mult * (zero[:, ui] & zero[:, vi])
            cnt11 += mult * (~zero[:, ui] & ~zero[:, vi])
        if log_beta is None:
            logw = np.where(cnt00 > 0, -np.inf, logw)
        else:
            logw = logw + cnt00 * log_beta
        if log_gamma is None:
            logw = np.where(cnt11 > 0, -np.inf, logw)
        else:
            logw = logw + cnt11 * log_gamma
        top = logw.max()
        if top == -np.inf:
            chunk_lses.append(-np.inf)
        else:
            chunk_lses.append(top + math.log(np.exp(logw - top).sum()))
    return float(np.logaddexp.reduce(np.array(chunk_lses)))


def _partition_exact(graph: FieldedGraph, params: SpinParams,
                     pins: PinAssignment):
    """Exact configuration sum with shared partial products (DFS over vertices)."""
    n = graph.n
    if n == 0:
        return Fraction(1)
    # high-degree vertices first so edge factors resolve near the DFS root,
    # where partial products are shared by many configurations
    deg = graph.degrees()
    ordered = sorted(graph.vertices, key=lambda vf: -deg[vf[0]])
    ids = [v for v, _ in ordered]
    pos = {v: i for i, v in enumerate(ids)}
    fields = [f for _, f in ordered]
    beta, gamma = params.beta, params.gamma

    # each edge is charged at its later endpoint so its factor is known there
    edges_at: list[Counter] = [Counter() for _ in range(n)]
    for u, v in graph.edges:
        i, j = pos[u], pos[v]
        edges_at[max(i, j)][min(i, j)] += 1
    max_mult = max((m for c in edges_at for m in c.values()), default=0)
    beta_pow = [beta ** k for k in range(max_mult + 1)]
    gamma_pow = [gamma ** k for k in range(max_mult + 1)]
    skip_beta = beta == 1
    skip_gamma = gamma == 1

    pinned = {pos[v]: s for v, s in pins.items()}
    spins = [0] * n
    total = [Fraction(0)]

    def descend(i, acc):
        if i == n:
            total[0] = total[0] + acc
            return
        choices = (pinned[i],) if i in pinned else (0, 1)
        for s in choices:
            spins[i] = s
            w = acc * fields[i] if s == 0 else acc
            for j, mult in edges_at[i].items():
                t = spins[j]
                if s == 0 and t == 0:
                    if not skip_beta:
                        w = w * beta_pow[mult]
                elif s == 1 and t == 1:
                    if not skip_gamma:
                        w = w * gamma_pow[mult]
            if w != 0:
                descend(i + 1, w)

    descend(0, Fraction(1))
    return total[0]


def partition_function(graph: FieldedGraph, params: SpinParams, *,
                       limit: int = ENUM_LIMIT, exact: Optional[bool] = None):
    """Partition function Z by exhaustive enumeration.

    ``exact=None`` picks the exact path when any field or edge weight is a
    Fraction/Quad and the float path otherwise; pass True/False to force.
    """
    _validate(graph, {}, limit)
    if exact is None:
        exact = _wants_exact(graph, params)
    if exact:
        return _partition_exact(graph, params, {})
    return math.exp(_log_partition_float(graph, params, {}))


def pinned_partition(graph: FieldedGraph, params: SpinParams,
                     pins: PinAssignment, *, limit: int = ENUM_LIMIT,
                     exact: Optional[bool] = None):
    """Partition function restricted to configurations agreeing with pins."""
    _validate(graph, pins, limit)
    if exact is None:
        exact = _wants_exact(graph, params)
    if exact:
        return _partition_exact(graph, params, pins)
    return math.exp(_log_partition_float(graph, params, pins))


def effective_field(graph: FieldedGraph, params: SpinParams, *,
                    limit: int = ENUM_LIMIT, exact: Optional[bool] = None):
    """Ratio Z(output=0)/Z(output=1) realised by the graph's output vertex."""
    if graph.output is None:
        raise DomainError("graph has no output vertex")
    _validate(graph, {}, limit)
    if exact is None:
        exact = _wants_exact(graph, params)
    if exact:
        z0 = _partition_exact(graph, params, {graph.output: 0})
        z1 = _partition_exact(graph, params, {graph.output: 1})
        if z1 == 0:
            raise DomainError("conditioned partition function Z(output=1) is zero")
        return z0 / z1
    l0 = _log_partition_float(graph, params, {graph.output: 0})
    l1 = _log_partition_float(graph, params, {graph.output: 1})
    if l1 == -math.inf:
        raise DomainError("conditioned partition function Z(output=1) is zero")
    return math.exp(l0 - l1)


# ---------------------------------------------------------------------------
# Graph JSON: {"beta": r, "gamma": r, "vertices": [{"id": s, "field": r}],
#              "edges": [[u, v], ...], "output": s|null}

def graph_to_json(graph: FieldedGraph, params: SpinParams) -> dict:
    return {
        "beta": params.beta,
        "gamma": params.gamma,
        "vertices": [{"id": v, "field": f} for v, f in graph.vertices],
        "edges": [[u, v] for u, v in graph.edges],
        "output": graph.output,
    }


def graph_from_json(doc: Mapping) -> tuple[FieldedGraph, SpinParams]:
    """Parse graph JSON; number types in the document are preserved.

    The document carries no uniform field, so the returned params use mu = 1;
    evaluation only reads the per-vertex fields.
    """
    try:
        verts = tuple((item["id"], item["field"]) for item in doc["vertices"])
        edges = tuple((u, v) for u, v in doc["edges"])
        graph = FieldedGraph(verts, edges, doc.get("output"))
        params = SpinParams(doc["beta"], doc["gamma"], 1)
    except (KeyError, TypeError) as exc:
        raise DomainError(f"malformed graph document: {exc}") from exc
    return graph, params
