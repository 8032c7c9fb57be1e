"""The six miners folding commit pairs and their file changes into results.

Every miner consumes a MiningData bundle produced by the pipeline after the
registration pass, so ids are already frozen and results are deterministic
regardless of how the diffs were computed.
"""

import math
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from sociogit.mappers import user_key
from sociogit.repo import ADD, DELETE, MODIFY, RENAME, map_lines_back

DEFAULT_FIX_PATTERN = "fix"
DEFAULT_MAX_FILES_PER_COMMIT = 500


@dataclass(frozen=True)
class DoaWeights:
    base: float = 3.293
    first_authorship: float = 1.098
    deliveries: float = 0.164
    acceptances: float = 0.321


class MiningData:
    """Walk results plus frozen registries, shared by all miners."""

    def __init__(self, pairs, changes, commits, files, users, aliases=None):
        self.pairs = list(pairs)
        self.changes = list(changes)
        self.commits = commits
        self.files = files
        self.users = users
        self.aliases = aliases
        self._primary = None
        self._by_sha = None
        self._path_maps = None

    def user_id(self, meta) -> int:
        return self.users.id_of(user_key(meta.author_name, meta.author_email, self.aliases))

    def target_file_id(self, change) -> int:
        """The one file id a change is counted under: old path for deletes."""
        path = change.old_path if change.kind == DELETE else change.new_path
        return self.files.id_of(path)

    def primary_indices(self) -> list:
        """Indices of the first pair per commit, i.e. one entry per commit."""
        if self._primary is None:
            seen = set()
            out = []
            for idx, pair in enumerate(self.pairs):
                if pair.current.sha not in seen:
                    seen.add(pair.current.sha)
                    out.append(idx)
            self._primary = out
        return self._primary

    def pair_index_of(self, sha: str):
        if self._by_sha is None:
            by_sha = {}
            for idx in self.primary_indices():
                by_sha[self.pairs[idx].current.sha] = idx
            self._by_sha = by_sha
        return self._by_sha.get(sha)

    def changes_by_path(self, idx: int) -> dict:
        """new_path → FileChange for one pair (deletes are not keyed)."""
        if self._path_maps is None:
            self._path_maps = [None] * len(self.pairs)
        cached = self._path_maps[idx]
        if cached is None:
            cached = {
                c.new_path: c for c in self.changes[idx] if c.new_path is not None
            }
            self._path_maps[idx] = cached
        return cached


def mine_changed_files(data: MiningData) -> dict:
    """user id → set of file ids the user ever changed (renames count both)."""
    out = {}
    for idx, pair in enumerate(data.pairs):
        uid = data.user_id(pair.current)
        bucket = out.setdefault(uid, set())
        for change in data.changes[idx]:
            bucket.add(data.target_file_id(change))
            if change.kind == RENAME:
                bucket.add(data.files.id_of(change.old_path))
    return out


def mine_assignment_matrix(data: MiningData) -> dict:
    """user id → {file id: number of that user's commits changing the file}."""
    out = {}
    for idx, pair in enumerate(data.pairs):
        uid = data.user_id(pair.current)
        row = out.setdefault(uid, {})
        for change in data.changes[idx]:
            fid = data.target_file_id(change)
            row[fid] = row.get(fid, 0) + 1
    return out


@dataclass
class DependencyResult:
    matrix: dict = field(default_factory=dict)  # both orientations, no diagonal
    skipped_commits: int = 0


def mine_file_dependency_matrix(data: MiningData,
                                max_files_per_commit: int = DEFAULT_MAX_FILES_PER_COMMIT
                                ) -> DependencyResult:
    """Co-change counts for unordered file pairs edited in the same commit.

    Commits whose changed-file set exceeds max_files_per_commit contribute
    nothing and are tallied in skipped_commits.
    """
    result = DependencyResult()
    matrix = result.matrix
    for idx in range(len(data.pairs)):
        ids = {data.target_file_id(c) for c in data.changes[idx]}
        if len(ids) > max_files_per_commit:
            result.skipped_commits += 1
            continue
        ordered = sorted(ids)
        for i, fi in enumerate(ordered):
            for fj in ordered[i + 1:]:
                row = matrix.setdefault(fi, {})
                row[fj] = row.get(fj, 0) + 1
                row = matrix.setdefault(fj, {})
                row[fi] = row.get(fi, 0) + 1
    return result


def mine_work_time(data: MiningData) -> dict:
    """user id → 7x24 grid of commit counts in the author's local time.

    Local time is author_time shifted by the recorded utc offset; day 0 is
    Monday.
    """
    out = {}
    for idx in data.primary_indices():
        meta = data.pairs[idx].current
        uid = data.user_id(meta)
        grid = out.get(uid)
        if grid is None:
            grid = [[0] * 24 for _ in range(7)]
            out[uid] = grid
        local = datetime.fromtimestamp(
            meta.author_time + meta.tz_offset * 60, tz=timezone.utc
        )
        grid[local.weekday()][local.hour] += 1
    return out


class RecordBlamer:
    """Line attribution computed from already-mined change records."""

    def __init__(self, data: MiningData):
        self.data = data

    def blame_positions(self, start_sha: str, path: str, positions) -> dict:
        """Map 1-based line positions of path@start_sha to introducing shas."""
        remaining = [(p, p) for p in sorted(positions)]
        out = {}
        cur_sha = start_sha
        while remaining:
            idx = self.data.pair_index_of(cur_sha)
            if idx is None:
                break
            pair = self.data.pairs[idx]
            change = self.data.changes_by_path(idx).get(path)
            if change is not None:
                if change.kind == ADD or change.binary:
                    for orig, _ in remaining:
                        out[orig] = cur_sha
                    return out
                hit, remaining = map_lines_back(remaining, change.hunks)
                for orig in hit:
                    out[orig] = cur_sha
                if change.kind == RENAME:
                    path = change.old_path
            if pair.parent is None:
                break
            cur_sha = pair.parent.sha
        for orig, _ in remaining:
            out[orig] = cur_sha
        return out

    def lineage(self, start_sha: str, path: str) -> list:
        """Changes that shaped path@start_sha, newest first, as (sha, kind)."""
        events = []
        cur_sha = start_sha
        while True:
            idx = self.data.pair_index_of(cur_sha)
            if idx is None:
                break
            pair = self.data.pairs[idx]
            change = self.data.changes_by_path(idx).get(path)
            if change is not None:
                events.append((cur_sha, change.kind))
                if change.kind == ADD:
                    break
                if change.kind == RENAME:
                    path = change.old_path
            if pair.parent is None:
                break
            cur_sha = pair.parent.sha
        return events


def compile_fix_pattern(pattern: str = DEFAULT_FIX_PATTERN):
    return re.compile(pattern, re.IGNORECASE)


def mine_commit_influence_graph(data: MiningData, fix_pattern=None) -> dict:
    """fix commit id → sorted ids of commits that introduced the fixed lines.

    A commit is a fix when its message matches fix_pattern (default: contains
    "fix", case-insensitive). Old-side line ranges of its MODIFY and DELETE
    hunks are blamed at the first parent.
    """
    if fix_pattern is None:
        fix_pattern = compile_fix_pattern()
    blamer = RecordBlamer(data)
    out = {}
    for idx in data.primary_indices():
        pair = data.pairs[idx]
        meta = pair.current
        if not fix_pattern.search(meta.message):
            continue
        cid = data.commits.id_of(meta.sha)
        introducers = set()
        if pair.parent is not None:
            for change in data.changes[idx]:
                if change.kind not in (MODIFY, DELETE) or change.binary:
                    continue
                positions = []
                for old_start, old_len, _ns, _nl in change.hunks:
                    positions.extend(range(old_start, old_start + old_len))
                if not positions:
                    continue
                blamed = blamer.blame_positions(
                    pair.parent.sha, change.old_path, positions
                )
                introducers.update(blamed.values())
        introducers.discard(meta.sha)
        out[cid] = sorted(data.commits.id_of(sha) for sha in introducers)
    return out


@dataclass
class OwnershipResult:
    doa: dict = field(default_factory=dict)    # user id → {file id: score}
    lines: dict = field(default_factory=dict)  # file id → {user id: count}


def raw_doa(fa: float, dl: int, ac: int, weights: 'DoaWeights | None' = None) -> float:
    """Unnormalized degree of authorship for one developer on one file.

    fa is 1 when the developer first authored the file, dl their change count,
    ac the number of changes by everyone else.
    """
    if weights is None:
        weights = DoaWeights()
    return (
        weights.base
        + weights.first_authorship * fa
        + weights.deliveries * dl
        - weights.acceptances * math.log(1 + ac)
    )


def mine_files_ownership(data: MiningData, head_sha: str,
                         weights: 'DoaWeights | None' = None,
                         blame_results=None, handle=None) -> OwnershipResult:
    """Authorship scores and surviving-line counts for files at head_sha.

    blame_results maps path → list of LineAttribution for text files at head;
    when absent it is computed through handle. The score per (user, file) is
    base + first_authorship·FA + deliveries·DL − acceptances·ln(1+AC), divided
    by the file's maximum and clamped to [0,1].
    """
    from sociogit import repo as _repo

    if weights is None:
        weights = DoaWeights()
    result = OwnershipResult()
    idx = data.pair_index_of(head_sha)
    if idx is None:
        return result
    head_meta = data.pairs[idx].current
    blamer = RecordBlamer(data)
    if handle is not None:
        head_files = handle.list_files(head_meta.tree_sha)
    else:
        head_files = []
    for path_b, _mode, _sha in head_files:
        path = path_b.decode("utf-8", "replace")
        if path not in data.files:
            continue
        fid = data.files.id_of(path)
        events = blamer.lineage(head_sha, path)
        if events:
            authors = []
            for sha, _kind in events:
                pidx = data.pair_index_of(sha)
                authors.append(data.user_id(data.pairs[pidx].current))
            first_author = authors[-1] if events[-1][1] == ADD else None
            total = len(authors)
            per_user = {}
            for uid in authors:
                per_user[uid] = per_user.get(uid, 0) + 1
            raws = {}
            for uid, dl in per_user.items():
                fa = 1.0 if uid == first_author else 0.0
                raws[uid] = raw_doa(fa, dl, total - dl, weights)
            peak = max(raws.values())
            for uid, raw in raws.items():
                score = raw / peak if peak > 0 else 0.0
                score = min(1.0, max(0.0, score))
                result.doa.setdefault(uid, {})[fid] = score
    # surviving-line counts from blame at head
    if blame_results is None:
        blame_results = {}
        if handle is not None:
            for path_b, _mode, blob_sha in head_files:
                data_bytes = handle.blob(blob_sha)
                if _repo.is_binary(data_bytes):
                    continue
                path = path_b.decode("utf-8", "replace")
                blame_results[path] = _repo.blame_file(handle, head_sha, path)
    for path, attributions in sorted(blame_results.items()):
        if path not in data.files:
            continue
        fid = data.files.id_of(path)
        counts = result.lines.setdefault(fid, {})
        for attr in attributions:
            uid = data.users.id_of(
                user_key(attr.author_name, attr.author_email, data.aliases)
            )
            counts[uid] = counts.get(uid, 0) + 1
    return result
