"""Derived analyses over mined matrices and graphs."""

import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from sociogit.errors import ConfigError, DimensionMismatch, EmptyGraph, IoError

DEFAULT_DAMPING = 0.85
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100
DEFAULT_PROXY_WINDOW_DAYS = 30


def compute_coordination_needs(assignment: dict, dependency: dict,
                               n_users: 'int | None' = None,
                               n_files: 'int | None' = None) -> dict:
    """Relative coordination need per user pair from A · D · Aᵀ.

    assignment is {user: {file: count}}, dependency {file: {file: count}}
    (symmetric). The integer product has its diagonal zeroed, then is divided
    by its maximum entry; only nonzero entries are returned.
    """
    max_user = max(assignment, default=-1)
    file_ids = [f for row in assignment.values() for f in row]
    file_ids += list(dependency)
    file_ids += [g for row in dependency.values() for g in row]
    max_file = max(file_ids, default=-1)
    if n_users is None:
        n_users = max_user + 1
    elif max_user >= n_users:
        raise DimensionMismatch(f"user id {max_user} outside {n_users} users")
    if n_files is None:
        n_files = max_file + 1
    elif max_file >= n_files:
        raise DimensionMismatch(f"file id {max_file} outside {n_files} files")
    if n_users == 0 or n_files == 0:
        return {}
    rows, cols, vals = [], [], []
    for uid, row in assignment.items():
        for fid, count in row.items():
            rows.append(uid)
            cols.append(fid)
            vals.append(count)
    a = sparse.coo_matrix(
        (np.asarray(vals, dtype=np.int64), (rows, cols)),
        shape=(n_users, n_files),
    ).tocsr()
    rows, cols, vals = [], [], []
    for fid, row in dependency.items():
        for gid, count in row.items():
            rows.append(fid)
            cols.append(gid)
            vals.append(count)
    d = sparse.coo_matrix(
        (np.asarray(vals, dtype=np.int64), (rows, cols)),
        shape=(n_files, n_files),
    ).tocsr()
    raw = (a @ d @ a.T).tolil()
    raw.setdiag(0)
    raw = raw.tocoo()
    peak = raw.data.max(initial=0)
    out = {}
    if peak <= 0:
        return out
    for i, j, v in zip(raw.row, raw.col, raw.data):
        if v:
            out.setdefault(int(i), {})[int(j)] = int(v) / int(peak)
    return out


@dataclass(frozen=True)
class CongruenceScore:
    value: float
    need_pairs: int
    matched: int


def compute_mirroring_congruence(needs: dict, edges: set,
                                 threshold: float = 0.0) -> CongruenceScore:
    """Share of coordination-need pairs mirrored by communication edges.

    needs is the coordination matrix as {u: {v: value}}; edges a set of
    unordered user-id pairs. Pairs with value > threshold count as needs; with
    no needs the score is 1 by definition.
    """
    if not 0 <= threshold < 1:
        raise ConfigError(f"need threshold must be in [0,1), got {threshold}")
    need_pairs = set()
    for u, row in needs.items():
        for v, value in row.items():
            if u < v and value > threshold:
                need_pairs.add((u, v))
    normalized = {(u, v) if u < v else (v, u) for u, v in edges}
    matched = len(need_pairs & normalized)
    if not need_pairs:
        return CongruenceScore(1.0, 0, 0)
    return CongruenceScore(matched / len(need_pairs), len(need_pairs), matched)


def compute_pagerank(graph: dict, damping: float = DEFAULT_DAMPING,
                     tol: float = DEFAULT_TOL,
                     max_iter: int = DEFAULT_MAX_ITER) -> dict:
    """PageRank over an adjacency map {node: [targets]} by power iteration.

    Dangling nodes redistribute uniformly; iteration stops when the L1 change
    drops below tol. The node set is keys plus all targets.
    """
    if not 0 < damping < 1:
        raise ConfigError(f"damping must be in (0,1), got {damping}")
    nodes = set(graph)
    for targets in graph.values():
        nodes.update(targets)
    if not nodes:
        raise EmptyGraph("influence graph has no nodes")
    order = sorted(nodes)
    index = {node: i for i, node in enumerate(order)}
    n = len(order)
    src_list, dst_list = [], []
    out_deg = np.zeros(n, dtype=np.int64)
    for i, node in enumerate(order):
        targets = graph.get(node)
        if not targets:
            continue
        distinct = sorted(set(targets))
        out_deg[i] = len(distinct)
        for t in distinct:
            src_list.append(i)
            dst_list.append(index[t])
    if not src_list:
        # no edges anywhere: the stationary distribution is exactly uniform
        return {node: 1.0 / n for node in order}
    src = np.asarray(src_list, dtype=np.intp)
    dst = np.asarray(dst_list, dtype=np.intp)
    dangling = out_deg == 0
    inv_deg = np.zeros(n)
    inv_deg[~dangling] = 1.0 / out_deg[~dangling]
    rank = np.full(n, 1.0 / n)
    base = (1.0 - damping) / n
    for _ in range(max_iter):
        spread = np.zeros(n)
        if len(src):
            np.add.at(spread, dst, rank[src] * inv_deg[src])
        lost = rank[dangling].sum() / n
        new_rank = base + damping * (spread + lost)
        if np.abs(new_rank - rank).sum() < tol:
            rank = new_rank
            break
        rank = new_rank
    return {node: float(rank[index[node]]) for node in order}


def derive_proxy_communication(data, window_days: int = DEFAULT_PROXY_WINDOW_DAYS) -> set:
    """Approximate communication edges: two users touching the same file
    within window_days of each other."""
    window = window_days * 86400
    per_file = {}
    for idx, pair in enumerate(data.pairs):
        uid = data.user_id(pair.current)
        when = pair.current.author_time
        for change in data.changes[idx]:
            per_file.setdefault(data.target_file_id(change), []).append((when, uid))
    edges = set()
    for events in per_file.values():
        events.sort()
        lo = 0
        for j in range(len(events)):
            tj, uj = events[j]
            while events[lo][0] < tj - window:
                lo += 1
            for k in range(lo, j):
                uk = events[k][1]
                if uk != uj:
                    edges.add((uk, uj) if uk < uj else (uj, uk))
    return edges


def load_communication_graph(path) -> set:
    """Read a communication graph file: {"edges": [[u,v] or [u,v,weight]]}."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"communication file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("edges"), list):
        raise ConfigError(f'communication file {path} must be {{"edges": [...]}}')
    edges = set()
    for item in doc["edges"]:
        if (
            not isinstance(item, list)
            or len(item) not in (2, 3)
            or not all(isinstance(x, int) for x in item[:2])
        ):
            raise ConfigError(f"bad communication edge {item!r}")
        u, v = item[0], item[1]
        if u == v:
            raise ConfigError(f"communication edge {item!r} is a self-loop")
        edges.add((u, v) if u < v else (v, u))
    return edges
