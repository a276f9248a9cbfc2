"""In-memory iSAX tree: bulk build, budgeted approximate search, exact search.

The root starts as a single leaf; on its first overflow it fans out into
one child per first-bit combination actually present, and deeper overflows
split one bit at a time (the word with the smallest split level, lowest
position on ties).  A leaf that has exhausted all l*b bits absorbs its
overflow and is flagged unsplittable rather than erroring.  After build the
tree is frozen; concurrent queries over it are safe.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .core import euclidean_to_rows
from .summarization import mindist, mindist_batch, paa

SUMMARIZATION_KINDS = ("paa", "dea")


class EmptyTree(ValueError):
    """Query or build over a tree with no series."""


class UnsupportedSummarization(ValueError):
    """Operation requires a lower-bounding (PAA) tree, or an unknown kind."""


@dataclass
class IsaxNode:
    levels: np.ndarray          # (l,) per-word split depth, 0..bits
    prefix: np.ndarray          # (l,) most-significant symbol bits at those depths
    depth: int
    ids: np.ndarray | None = None       # leaf payload in insertion order
    children: dict = field(default_factory=dict)
    split_word: int | None = None
    unsplittable: bool = False
    _batch: tuple | None = None         # cached (child list, prefixes, levels)

    @property
    def is_leaf(self) -> bool:
        return self.ids is not None

    def __len__(self) -> int:
        return 0 if self.ids is None else int(self.ids.size)

    def child_batch(self) -> tuple:
        if self._batch is None:
            kids = list(self.children.values())
            self._batch = (kids,
                           np.stack([k.prefix for k in kids]).astype(np.int64),
                           np.stack([k.levels for k in kids]))
        return self._batch


@dataclass
class IsaxTree:
    root: IsaxNode
    n: int
    l: int
    bits: int
    leaf_size: int
    source_length: int
    summarization_kind: str = "paa"

    def leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node
            else:
                stack.extend(node.children.values())

    def leaf_assignments(self) -> np.ndarray:
        """Map each series id to a leaf ordinal."""
        out = np.full(self.n, -1, dtype=np.int64)
        for ordinal, leaf in enumerate(self.leaves()):
            out[leaf.ids] = ordinal
        return out

    def stats(self) -> dict:
        leaves = max_leaf = unsplittable = depth = 0
        for leaf in self.leaves():
            leaves += 1
            max_leaf = max(max_leaf, len(leaf))
            unsplittable += int(leaf.unsplittable)
            depth = max(depth, leaf.depth)
        return {"leaves": leaves, "max_leaf": max_leaf,
                "unsplittable": unsplittable, "depth": depth}

    def stats_line(self) -> str:
        s = self.stats()
        return (f"leaves={s['leaves']} max_leaf={s['max_leaf']} "
                f"unsplittable={s['unsplittable']} depth={s['depth']}")


def build(sax_words, bits: int, leaf_size: int, source_length: int,
          summarization_kind: str = "paa") -> IsaxTree:
    """Bulk-load an iSAX tree over (n, l) SAX words.

    Every id ends up in exactly one leaf, reachable by its word's bits.
    """
    words = np.ascontiguousarray(sax_words, dtype=np.uint8)
    if words.ndim != 2 or words.shape[0] == 0:
        raise EmptyTree(f"need a non-empty (n, l) word array, got shape {words.shape}")
    if leaf_size < 1:
        raise ValueError(f"leaf_size must be >= 1, got {leaf_size}")
    if summarization_kind not in SUMMARIZATION_KINDS:
        raise UnsupportedSummarization(f"unknown summarization kind {summarization_kind!r}")
    n, l = words.shape

    root = IsaxNode(levels=np.zeros(l, dtype=np.int64),
                    prefix=np.zeros(l, dtype=np.uint8), depth=0,
                    ids=np.arange(n, dtype=np.int64))
    tree = IsaxTree(root=root, n=n, l=l, bits=bits, leaf_size=leaf_size,
                    source_length=source_length, summarization_kind=summarization_kind)
    if n <= leaf_size:
        return tree

    # root overflow: fan out by first-bit combination, present combos only
    first_bits = (words >> (bits - 1)) & 1
    packed = np.packbits(first_bits, axis=1)
    _, inverse, counts = np.unique(packed, axis=0, return_inverse=True, return_counts=True)
    by_group = np.argsort(inverse.ravel(), kind="stable")  # ascending id within groups
    bounds = np.concatenate(([0], np.cumsum(counts)))
    pending = []
    for g in range(counts.size):
        ids = np.sort(by_group[bounds[g] : bounds[g + 1]])
        child = IsaxNode(levels=np.ones(l, dtype=np.int64),
                         prefix=first_bits[ids[0]].astype(np.uint8), depth=1, ids=ids)
        root.children[packed[ids[0]].tobytes()] = child  # keyed by the combination
        pending.append(child)
    root.ids = None
    root.split_word = -1

    while pending:
        node = pending.pop()
        if len(node) <= leaf_size:
            continue
        if int(node.levels.min()) >= bits:
            node.unsplittable = True  # all bits exhausted; absorb overflow
            continue
        w = int(np.argmin(node.levels))
        t = int(node.levels[w])
        bit_vals = (words[node.ids, w] >> (bits - 1 - t)) & 1
        for bit in (0, 1):
            ids = node.ids[bit_vals == bit]
            if ids.size == 0:
                continue
            levels = node.levels.copy()
            levels[w] = t + 1
            prefix = node.prefix.copy()
            prefix[w] = (prefix[w] << 1) | bit
            child = IsaxNode(levels=levels, prefix=prefix, depth=node.depth + 1, ids=ids)
            node.children[bit] = child
            pending.append(child)
        node.ids = None
        node.split_word = w

    # freeze traversal metadata so queries never mutate shared state
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.is_leaf:
            node.child_batch()
            stack.extend(node.children.values())
    return tree


def node_mindist(tree: IsaxTree, node: IsaxNode, query_summary) -> float:
    return mindist(query_summary, node.prefix, node.levels, tree.bits, tree.source_length)


def _push_children(tree: IsaxTree, node: IsaxNode, qsum, heap, counter: int) -> int:
    kids, prefixes, levels = node.child_batch()
    dists = mindist_batch(qsum, prefixes, levels, tree.bits, tree.source_length)
    for child, md in zip(kids, dists):
        counter += 1
        heapq.heappush(heap, (float(md), counter, child))
    return counter


def _query_summary_for(tree: IsaxTree, query, query_summary):
    if query_summary is not None:
        return np.asarray(query_summary, dtype=np.float64)
    if tree.summarization_kind == "paa":
        return paa(query, tree.l)
    raise UnsupportedSummarization(
        "dea trees need a precomputed query summary (unit scale)")


def tightness(exact_distance: float, bsf_distance: float) -> float:
    """exact/bsf in (0, 1]; the 0/0 case (query in the dataset) is 1."""
    if bsf_distance == 0.0:
        return 1.0
    return exact_distance / bsf_distance


@dataclass
class QueryReport:
    """Per-query record: BSF trajectory vs. series examined."""

    qid: int
    budget: int
    trajectory: list            # [(series_examined, bsf_distance), ...]
    answer_id: int
    bsf_distance: float
    exact_distance: float | None = None

    @property
    def tightness(self) -> float:
        if self.exact_distance is None:
            raise ValueError("exact distance not computed for this report")
        return tightness(self.exact_distance, self.bsf_distance)

    def line(self) -> str:
        exact = float("nan") if self.exact_distance is None else self.exact_distance
        tight = float("nan") if self.exact_distance is None else self.tightness
        return (f"qid={self.qid} budget={self.budget} bsf={self.bsf_distance:.6f} "
                f"exact={exact:.6f} tightness={tight:.6f}")


def approx_query(tree: IsaxTree, data, query, budget: int,
                 query_summary=None, qid: int = 0) -> QueryReport:
    """Budget-limited search: leaves visited in ascending MINDIST order.

    Scans raw series leaf by leaf (insertion order inside a leaf, truncated
    at the budget) and records the best-so-far after every visited leaf.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    if tree.n == 0:
        raise EmptyTree("tree holds no series")
    data = np.asarray(data)
    qsum = _query_summary_for(tree, query, query_summary)
    q = np.asarray(query, dtype=np.float64)

    counter = 0
    heap = [(0.0, counter, tree.root)]
    examined = 0
    bsf = np.inf
    best_id = -1
    trajectory = []
    while heap and examined < budget:
        _, _, node = heapq.heappop(heap)
        if not node.is_leaf:
            counter = _push_children(tree, node, qsum, heap, counter)
            continue
        if len(node) == 0:
            continue
        take = min(len(node), budget - examined)
        ids = node.ids[:take]
        dists = euclidean_to_rows(data[ids], q)
        j = int(np.argmin(dists))
        if dists[j] < bsf:  # ties keep the earlier id
            bsf = float(dists[j])
            best_id = int(ids[j])
        examined += take
        trajectory.append((examined, bsf))
    return QueryReport(qid=qid, budget=budget, trajectory=trajectory,
                       answer_id=best_id, bsf_distance=bsf)


def exact_query_bruteforce(data, query) -> tuple[int, float, int]:
    """Full scan; returns (id, distance, series_examined), ties to lowest id."""
    data = np.asarray(data)
    dists = euclidean_to_rows(data, np.asarray(query, dtype=np.float64))
    best = int(np.argmin(dists))  # first minimum = lowest id
    return best, float(dists[best]), data.shape[0]


def exact_query_pruned(tree: IsaxTree, data, query) -> tuple[int, float, int]:
    """MINDIST-pruned exact search; only sound over PAA trees.

    Returns (id, distance, series_examined) identical to the brute-force
    answer, usually after examining far fewer series.
    """
    if tree.summarization_kind != "paa":
        raise UnsupportedSummarization(
            f"no lower bound exists for {tree.summarization_kind!r} trees")
    if tree.n == 0:
        raise EmptyTree("tree holds no series")
    data = np.asarray(data)
    q = np.asarray(query, dtype=np.float64)
    qsum = paa(q, tree.l)

    counter = 0
    heap = [(0.0, counter, tree.root)]
    bsf = np.inf
    best_id = -1
    examined = 0
    while heap:
        md, _, node = heapq.heappop(heap)
        if md > bsf:
            break  # every remaining node is at least this far
        if not node.is_leaf:
            counter = _push_children(tree, node, qsum, heap, counter)
            continue
        if len(node) == 0:
            continue
        dists = euclidean_to_rows(data[node.ids], q)
        j = int(np.argmin(dists))
        d, cand = float(dists[j]), int(node.ids[j])
        if d < bsf or (d == bsf and cand < best_id):
            bsf, best_id = d, cand
        examined += len(node)
    return best_id, bsf, examined


def leaf_compactness(tree: IsaxTree, data, leaves=None) -> float:
    """Mean pairwise distance within leaves, averaged over multi-member leaves.

    Singleton leaves contribute nothing; returns nan when no leaf has a pair.
    """
    from scipy.spatial.distance import pdist

    data = np.asarray(data)
    if leaves is None:
        leaves = list(tree.leaves())
    means = [pdist(data[leaf.ids].astype(np.float64)).mean()
             for leaf in leaves if len(leaf) >= 2]
    return float(np.mean(means)) if means else float("nan")


def ideal_tightness_curve(data, queries, base_summaries, query_summaries,
                          budgets) -> np.ndarray:
    """Index-free tightness upper bound per budget, averaged over queries.

    For each budget k, examine the k series closest to the query in the
    summarization space and report tightness of the best true distance
    found.  The scale of the summaries is irrelevant (ranking only).
    """
    data = np.asarray(data)
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    base_summaries = np.asarray(base_summaries, dtype=np.float64)
    query_summaries = np.atleast_2d(np.asarray(query_summaries, dtype=np.float64))
    budgets = np.asarray(budgets, dtype=np.int64)
    n = data.shape[0]
    if np.any(budgets < 1) or np.any(budgets > n):
        raise ValueError(f"budgets must lie in 1..{n}")
    acc = np.zeros(budgets.size)
    for q, qs in zip(queries, query_summaries):
        true_d = euclidean_to_rows(data, q)
        exact = float(true_d.min())
        order = np.argsort(euclidean_to_rows(base_summaries, qs), kind="stable")
        best_prefix = np.minimum.accumulate(true_d[order])
        acc += [tightness(exact, float(best_prefix[k - 1])) for k in budgets]
    return acc / queries.shape[0]
