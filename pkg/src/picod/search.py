"""Exhaustive branch-and-bound search for minimum-length secure linear codes.

Feasibility depends only on the row space of the generator matrix, so the
search walks subspaces rather than row subsets. A subspace is visited once,
through its greedy basis over the ordered candidate pool: a pool row may be
appended only if it is the lowest-indexed pool row in the new coset it
opens. On top of that exact enumeration, three sound reductions apply:

* violation pruning: learned symbols only grow with the span, so a node
  where some user already has positive leakage on two messages is dropped;
* rotation: the root only takes pool rows whose interval starts at
  message 1 (every subspace has a rotation containing such a row);
* range pruning (scalar, non-divisible instances only): rows of range 1
  or >= s never appear in feasible codes, so the pool omits them.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .code import CodeRow, LinearCode, circular_range
from .field import check_prime, inverses, rank
from .instance import Instance
from .verify import verify

DEFAULT_NODE_BUDGET = 10**8
DEFAULT_TIME_BUDGET = 600.0


class SearchBudgetExceeded(RuntimeError):
    pass


class SearchStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE_CERTIFIED = "InfeasibleCertified"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CandidatePool:
    """Pool rows in search order, one representative per scalar-multiple class."""

    instance: Instance
    p: int
    t: int
    b_min: int
    b_max: int
    rows: tuple[tuple[int, ...], ...]
    starts: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def range_pruned(self) -> bool:
        return self.b_min > 1 or self.b_max < self.instance.s


def default_range_pruning(inst: Instance, t: int) -> bool:
    return t == 1 and not inst.divisible


def _unit_vectors(p: int, t: int) -> list[tuple[int, ...]]:
    return [v for v in itertools.product(range(p), repeat=t) if any(v)]


def build_pool(inst: Instance, p: int = 2, t: int = 1, range_pruning: bool | None = None) -> CandidatePool:
    """All nonzero window-valid rows with range in [b_min, b_max], up to scalars.

    Ordered by interval start, then support bitmask, then coefficients.
    """
    check_prime(p)
    if range_pruning is None:
        range_pruning = default_range_pruning(inst, t)
    m, s = inst.m, inst.s
    b_min, b_max = (2, s - 1) if range_pruning else (1, s)

    supports: dict[tuple[int, ...], tuple[int, int]] = {}
    for a in range(1, m + 1):
        window = [inst.wrap(a + k) for k in range(s)]
        for size in range(1, s + 1):
            for supp in itertools.combinations(sorted(window), size):
                if supp in supports:
                    continue
                b, start = circular_range(supp, m)
                if b_min <= b <= b_max:
                    supports[supp] = (start, sum(1 << (i - 1) for i in supp))

    blocks = _unit_vectors(p, t)
    entries = []
    for supp, (start, mask) in supports.items():
        for choice in itertools.product(blocks, repeat=len(supp)):
            coeffs = [0] * (m * t)
            for i, blk in zip(supp, choice):
                coeffs[(i - 1) * t:i * t] = blk
            lead = next(c for c in coeffs if c)
            if lead != 1:
                continue
            entries.append((start, mask, tuple(coeffs)))
    entries.sort()
    return CandidatePool(inst, p, t, b_min, b_max, tuple(e[2] for e in entries), tuple(e[0] for e in entries))


class _BitSpace:
    """GF(2) vectors as int bitmasks; column c is bit c."""

    def __init__(self, inst: Instance, t: int):
        self.t = t
        self.m = inst.m
        self.block_masks = [((1 << t) - 1) << (i * t) for i in range(inst.m)]
        self.unknown = []
        for j in range(1, inst.m + 1):
            known = 0
            for i in inst.side_info(j):
                known |= self.block_masks[i - 1]
            self.unknown.append(((1 << (inst.m * t)) - 1) & ~known)

    def encode(self, coeffs) -> int:
        return sum(1 << c for c, x in enumerate(coeffs) if x)

    def pool_array(self, vecs: list[int]) -> np.ndarray:
        return np.array(vecs, dtype=np.uint64)

    def canonical(self, reds: np.ndarray) -> np.ndarray:
        keys, first = np.unique(reds, return_index=True)
        return np.sort(first[keys != 0])

    def eliminate(self, reds: np.ndarray, i: int) -> np.ndarray:
        r = int(reds[i])
        hit = (reds & np.uint64(r & -r)) != 0
        return np.where(hit, reds ^ np.uint64(r), reds)

    def user_add(self, rows: tuple[int, ...], vec: int, j: int) -> tuple[int, ...]:
        # rows: reduced echelon basis of the user's view, pivot = lowest set bit
        v = vec & self.unknown[j]
        for r in rows:
            if v & (r & -r):
                v ^= r
        if not v:
            return rows
        low = v & -v
        return tuple((r ^ v) if r & low else r for r in rows) + (v,)

    def user_leak(self, rows: tuple[int, ...]) -> tuple[int, int]:
        """(messages with positive leakage, messages fully learned)."""
        if self.t == 1:
            n = sum(1 for r in rows if not r & (r - 1))
            return n, n
        groups: dict[int, list[int]] = {}
        for r in rows:
            blk = ((r & -r).bit_length() - 1) // self.t
            groups.setdefault(blk, []).append(r & ~self.block_masks[blk])
        pos = full = 0
        for blk, rest in groups.items():
            leak = len(rest) - _bit_rank(rest)
            if leak:
                pos += 1
                full += leak == self.t
        return pos, full


def _bit_rank(vecs: list[int]) -> int:
    pivots: dict[int, int] = {}
    for v in vecs:
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                break
            v ^= pivots[top]
    return len(pivots)


class _ModSpace:
    """GF(p) vectors as tuples; slower, works for any prime p."""

    def __init__(self, inst: Instance, p: int, t: int):
        self.p, self.t, self.m = p, t, inst.m
        self.inv = inverses(p)
        self.unknown_cols = []
        for j in range(1, inst.m + 1):
            known = inst.side_info(j)
            self.unknown_cols.append(
                frozenset(c for c in range(inst.m * t) if c // t + 1 not in known)
            )

    def encode(self, coeffs) -> tuple[int, ...]:
        return tuple(coeffs)

    def pool_array(self, vecs) -> np.ndarray:
        return np.array(vecs, dtype=np.int64).reshape(len(vecs), self.m * self.t)

    def canonical(self, reds: np.ndarray) -> np.ndarray:
        nonzero = reds.any(axis=1)
        lead_idx = np.argmax(reds != 0, axis=1)
        lead = reds[np.arange(len(reds)), lead_idx]
        scale = np.array(self.inv, dtype=np.int64)[lead]
        normed = (reds * scale[:, None]) % self.p
        _, first = np.unique(normed, axis=0, return_index=True)
        return np.sort(first[nonzero[first]])

    def eliminate(self, reds: np.ndarray, i: int) -> np.ndarray:
        r = reds[i]
        q = int(np.flatnonzero(r)[0])
        r = (r * self.inv[int(r[q])]) % self.p
        return (reds - np.outer(reds[:, q], r)) % self.p

    def user_add(self, rows, vec, j):
        # rows: tuple of (pivot, vector) in reduced echelon form, pivots normalized to 1
        p = self.p
        cols = self.unknown_cols[j]
        v = [x if c in cols else 0 for c, x in enumerate(vec)]
        for q, r in rows:
            if v[q]:
                c = v[q]
                v = [(a - c * b) % p for a, b in zip(v, r)]
        if not any(v):
            return rows
        q = next(c for c, x in enumerate(v) if x)
        inv = self.inv[v[q]]
        v = tuple((x * inv) % p for x in v)
        out = []
        for pq, r in rows:
            if r[q]:
                c = r[q]
                r = tuple((a - c * b) % p for a, b in zip(r, v))
            out.append((pq, r))
        return tuple(out) + ((q, v),)

    def user_leak(self, rows) -> tuple[int, int]:
        t = self.t
        groups: dict[int, list[tuple[int, ...]]] = {}
        for q, r in rows:
            blk = q // t
            rest = list(r)
            rest[blk * t:(blk + 1) * t] = [0] * t
            groups.setdefault(blk, []).append(rest)
        pos = full = 0
        for blk, rest in groups.items():
            leak = len(rest) - rank(rest, self.p)
            if leak:
                pos += 1
                full += leak == t
        return pos, full


@dataclass
class SearchStats:
    nodes: int = 0
    evaluated: int = 0
    pruned_violation: int = 0
    skipped_rotation: int = 0
    feasible_seen: int = 0
    elapsed: float = 0.0

    def merge(self, other: SearchStats) -> None:
        self.nodes += other.nodes
        self.evaluated += other.evaluated
        self.pruned_violation += other.pruned_violation
        self.skipped_rotation += other.skipped_rotation
        self.feasible_seen += other.feasible_seen

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "evaluated": self.evaluated,
            "pruned_violation": self.pruned_violation,
            "skipped_rotation": self.skipped_rotation,
            "feasible_seen": self.feasible_seen,
            "elapsed_seconds": round(self.elapsed, 3),
        }


@dataclass(frozen=True)
class SearchOptions:
    prune_violations: bool = True
    rotation: bool = True
    range_pruning: bool | None = None
    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget: float = DEFAULT_TIME_BUDGET
    backend: str = "auto"  # "auto", "bits" (p=2 only) or "generic"


class _Found(Exception):
    pass


class _Searcher:
    """Depth-first walk over canonical subspaces.

    mode "min": branch and bound, keep the first feasible node of least depth.
    mode "first": stop at the first feasible node.
    mode "all": record every feasible node (descendants are not explored).
    """

    def __init__(self, pool: CandidatePool, opts: SearchOptions, mode: str, max_len: int,
                 stop_at: int | None = None, root_subset: frozenset[int] | None = None):
        self.pool, self.opts, self.mode = pool, opts, mode
        inst = pool.instance
        self.m = inst.m
        use_bits = pool.p == 2 and inst.m * pool.t <= 64 and opts.backend != "generic"
        if opts.backend == "bits" and not use_bits:
            raise ValueError("bit backend needs p=2 and m*t <= 64")
        self.space = _BitSpace(inst, pool.t) if use_bits else _ModSpace(inst, pool.p, pool.t)
        self.vecs = [self.space.encode(r) for r in pool.rows]
        self.bound = max_len + 1
        self.stop_at = stop_at
        self.root_subset = root_subset
        self.t = pool.t
        self.best: tuple[int, ...] | None = None
        self.found: list[tuple[int, ...]] = []
        self.stats = SearchStats()
        self.deadline = time.monotonic() + opts.time_budget

    def run(self) -> None:
        start = time.monotonic()
        try:
            if self.vecs:
                empty_users = tuple(() for _ in range(self.m))
                self._dfs((), -1, self.space.pool_array(self.vecs), empty_users)
        except _Found:
            pass
        finally:
            self.stats.elapsed = time.monotonic() - start

    def _tick(self) -> None:
        self.stats.nodes += 1
        if self.stats.nodes > self.opts.node_budget:
            raise SearchBudgetExceeded(f"node budget {self.opts.node_budget} exhausted")
        if self.stats.nodes % 256 == 0 and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded(f"time budget {self.opts.time_budget}s exhausted")

    def _dfs(self, chosen, last, reds, users) -> None:
        self._tick()
        depth = len(chosen) + 1
        space, t = self.space, self.t
        for i in space.canonical(reds):
            i = int(i)
            if i <= last:
                continue
            if not chosen:
                if self.opts.rotation and self.pool.starts[i] != 1:
                    self.stats.skipped_rotation += 1
                    continue
                if self.root_subset is not None and i not in self.root_subset:
                    continue
            if depth >= self.bound:
                return
            self.stats.evaluated += 1
            vec = self.vecs[i]
            new_users = []
            violated = False
            satisfied = True
            for j in range(self.m):
                rows = space.user_add(users[j], vec, j)
                pos, full = space.user_leak(rows)
                if pos >= 2:
                    violated = True
                    if self.opts.prune_violations:
                        break
                if not (pos == 1 and full == 1):
                    satisfied = False
                new_users.append(rows)
            if violated:
                if self.opts.prune_violations:
                    self.stats.pruned_violation += 1
                    continue
            elif satisfied:
                self._record(chosen + (i,))
                continue
            if depth + 1 < self.bound:
                self._dfs(chosen + (i,), i, space.eliminate(reds, i), tuple(new_users))

    def _record(self, combo: tuple[int, ...]) -> None:
        self.stats.feasible_seen += 1
        if self.mode == "all":
            self.found.append(combo)
            return
        self.best = combo
        if self.mode == "first":
            raise _Found
        self.bound = len(combo)
        if self.stop_at is not None and len(combo) <= self.stop_at:
            raise _Found


def _code_from(pool: CandidatePool, combo) -> LinearCode:
    return LinearCode(pool.instance, tuple(CodeRow(pool.rows[i]) for i in combo), p=pool.p, t=pool.t)


@dataclass(frozen=True)
class SearchOutcome:
    status: SearchStatus
    instance: Instance
    p: int
    t: int
    max_rank_searched: int
    exhaustive: bool
    code: LinearCode | None
    best_found: LinearCode | None
    stats: SearchStats = field(compare=False)
    pool_size: int = 0
    range_pruned: bool = False
    note: str = ""

    @property
    def length(self) -> Fraction | None:
        return None if self.code is None else self.code.length

    def to_dict(self) -> dict:
        doc = {
            "status": self.status.value,
            "m": self.instance.m,
            "s": self.instance.s,
            "p": self.p,
            "t": self.t,
            "length": None if self.code is None else str(self.code.length),
            "max_rank_searched": self.max_rank_searched,
            "exhaustive": self.exhaustive,
            "pool_size": self.pool_size,
            "range_pruned": self.range_pruned,
            "stats": self.stats.to_dict(),
            "code": None if self.code is None else self.code.to_dict(),
            "best_found": None if self.best_found is None else self.best_found.to_dict(),
        }
        if self.note:
            doc["note"] = self.note
        return doc


def _run_partition(pool, opts, mode, max_len, stop_at, subset):
    s = _Searcher(pool, opts, mode, max_len, stop_at, subset)
    try:
        s.run()
        exhausted = None
    except SearchBudgetExceeded as exc:
        exhausted = str(exc)
    return s.best, s.found, s.stats, exhausted


def _search(pool, opts, mode, max_len, stop_at=None, workers=1):
    """Returns (best combo, all found combos, stats, budget message or None)."""
    if workers <= 1 or mode == "first":
        return _run_partition(pool, opts, mode, max_len, stop_at, None)
    roots = [i for i, a in enumerate(pool.starts) if a == 1 or not opts.rotation]
    parts = [frozenset(roots[k::workers]) for k in range(workers)]
    share = SearchOptions(opts.prune_violations, opts.rotation, opts.range_pruning,
                          max(1, opts.node_budget // workers), opts.time_budget, opts.backend)
    with ProcessPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(_run_partition, *zip(*[(pool, share, mode, max_len, stop_at, part) for part in parts])))
    stats = SearchStats()
    best, found, exhausted = None, [], None
    for b, f, st, ex_msg in results:
        stats.merge(st)
        stats.elapsed = max(stats.elapsed, st.elapsed)
        found += f
        exhausted = exhausted or ex_msg
        if b is not None and (best is None or (len(b), b) < (len(best), best)):
            best = b
    return best, sorted(found), stats, exhausted


def _options(range_pruning, node_budget, time_budget, prune_violations, rotation, backend) -> SearchOptions:
    return SearchOptions(
        prune_violations=prune_violations,
        rotation=rotation,
        range_pruning=range_pruning,
        node_budget=DEFAULT_NODE_BUDGET if node_budget is None else node_budget,
        time_budget=DEFAULT_TIME_BUDGET if time_budget is None else time_budget,
        backend=backend,
    )


def min_length_search(
    inst: Instance,
    p: int = 2,
    t: int = 1,
    max_len: int | None = None,
    *,
    node_budget: int | None = None,
    time_budget: float | None = None,
    prune_violations: bool = True,
    rotation: bool = True,
    range_pruning: bool | None = None,
    stop_at: int | None = None,
    warm_start: LinearCode | None = None,
    workers: int = 1,
    backend: str = "auto",
) -> SearchOutcome:
    """Find a minimum-row feasible code over GF(p) with subpacketization t.

    ``stop_at`` is a trusted lower bound: the search ends as soon as a
    feasible code with that many rows is found. Without it the search
    proves minimality itself. A ``warm_start`` code caps the depth at its
    row count and is returned if nothing at most as short is found.
    """
    full = inst.m * t
    max_len = full if max_len is None else max_len
    if not 0 <= max_len <= full:
        raise ValueError(f"max_len must lie in [0, m*t] = [0, {full}], got {max_len}")
    opts = _options(range_pruning, node_budget, time_budget, prune_violations, rotation, backend)
    pool = build_pool(inst, p, t, opts.range_pruning)
    cap = max_len
    if warm_start is not None:
        if not verify(warm_start).feasible:
            raise ValueError("warm start code is not feasible")
        cap = min(cap, len(warm_start.rows))
    best, _, stats, exhausted = _search(pool, opts, "min", cap, stop_at, workers)
    code = None if best is None else _code_from(pool, best)
    if code is None and warm_start is not None and exhausted is None:
        code = warm_start
    if code is not None and not verify(code).feasible:
        raise AssertionError(f"search produced an infeasible code: {code}")
    common = dict(instance=inst, p=p, t=t, stats=stats, pool_size=len(pool), range_pruned=pool.range_pruned)
    if exhausted is not None:
        return SearchOutcome(SearchStatus.UNKNOWN, max_rank_searched=cap, exhaustive=False,
                             code=None, best_found=code, note=exhausted, **common)
    if code is not None:
        return SearchOutcome(SearchStatus.OPTIMAL, max_rank_searched=cap, exhaustive=True,
                             code=code, best_found=code, **common)
    return SearchOutcome(SearchStatus.INFEASIBLE_CERTIFIED, max_rank_searched=cap, exhaustive=cap == full,
                         code=None, best_found=None, **common)


def prove_lower_bound(
    inst: Instance,
    p: int = 2,
    t: int = 1,
    target: int = 1,
    *,
    node_budget: int | None = None,
    time_budget: float | None = None,
    prune_violations: bool = True,
    rotation: bool = True,
    range_pruning: bool | None = None,
) -> bool:
    """True iff no feasible code with fewer than ``target`` rows exists.

    Raises SearchBudgetExceeded when the refutation cannot be completed.
    """
    if not 1 <= target <= inst.m * t:
        raise ValueError(f"target must lie in [1, m*t], got {target}")
    opts = _options(range_pruning, node_budget, time_budget, prune_violations, rotation, "auto")
    pool = build_pool(inst, p, t, opts.range_pruning)
    best, _, _, exhausted = _search(pool, opts, "first", target - 1)
    if best is not None:
        return False
    if exhausted is not None:
        raise SearchBudgetExceeded(exhausted)
    return True


def enumerate_feasible(
    inst: Instance,
    p: int = 2,
    t: int = 1,
    max_len: int | None = None,
    *,
    node_budget: int | None = None,
    time_budget: float | None = None,
    rotation: bool = True,
    range_pruning: bool | None = None,
    prune_violations: bool = True,
) -> list[LinearCode]:
    """Feasible codes reached by the walk.

    These are the feasible subspaces none of whose greedy-basis prefixes is
    feasible, each given by its greedy basis.

    With ``rotation`` only one representative per rotation class (rooted at
    message 1) is guaranteed.
    """
    max_len = inst.m * t if max_len is None else max_len
    opts = _options(range_pruning, node_budget, time_budget, prune_violations, rotation, "auto")
    pool = build_pool(inst, p, t, opts.range_pruning)
    _, found, _, exhausted = _search(pool, opts, "all", max_len)
    if exhausted is not None:
        raise SearchBudgetExceeded(exhausted)
    return [_code_from(pool, combo) for combo in found]
