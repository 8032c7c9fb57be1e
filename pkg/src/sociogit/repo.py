"""Repository access: commit walking, tree diffing, rename detection, blame.

All functions are read-only. Paths are returned as str; tree walking happens
on bytes so ordering matches the on-disk tree entry order.
"""

from dataclasses import dataclass
from pathlib import Path

from sociogit import gitdb, kernels
from sociogit.errors import (
    BinaryFile,
    CorruptObject,
    FileNotInTree,
    UnknownBranch,
)

ADD = "ADD"
MODIFY = "MODIFY"
DELETE = "DELETE"
RENAME = "RENAME"

# upper bound on delete x add pairings scored during content rename detection
_RENAME_CANDIDATE_CAP = 5000
_GITLINK = 0o160000


@dataclass(frozen=True, slots=True)
class CommitMeta:
    sha: str
    tree_sha: str
    parent_shas: tuple
    author_name: str
    author_email: str
    author_time: int
    tz_offset: int
    message: str


@dataclass(frozen=True, slots=True)
class CommitPair:
    """A commit and the parent it is diffed against; parent None at a root."""

    current: CommitMeta
    parent: 'CommitMeta | None'


@dataclass(frozen=True, slots=True)
class FileChange:
    kind: str
    old_path: 'str | None'
    new_path: 'str | None'
    hunks: tuple
    binary: bool = False

    @property
    def path(self) -> str:
        return self.new_path if self.new_path is not None else self.old_path


@dataclass(frozen=True, slots=True)
class LineAttribution:
    line_no: int
    introducing_sha: str
    author_name: str
    author_email: str


class _LruCache:
    __slots__ = ("cap", "data")

    def __init__(self, cap):
        self.cap = cap
        self.data = {}

    def get(self, key):
        val = self.data.pop(key, None)
        if val is not None:
            self.data[key] = val
        return val

    def put(self, key, value):
        if key in self.data:
            self.data.pop(key)
        elif len(self.data) >= self.cap:
            self.data.pop(next(iter(self.data)))
        self.data[key] = value


class RepositoryHandle:
    """Open repository with parsed-object caches. Cheap to construct."""

    def __init__(self, path):
        self.path = Path(path)
        self.git_dir = gitdb.discover_git_dir(self.path)
        self.store = gitdb.ObjectStore(self.git_dir)
        self._commits = {}
        self._trees = _LruCache(8192)

    def commit(self, sha: str) -> CommitMeta:
        meta = self._commits.get(sha)
        if meta is None:
            fields = gitdb.parse_commit(sha, self.store.get(sha, gitdb.OBJ_COMMIT))
            meta = CommitMeta(
                sha=sha,
                tree_sha=fields["tree"],
                parent_shas=fields["parents"],
                author_name=fields["author_name"],
                author_email=fields["author_email"],
                author_time=fields["author_time"],
                tz_offset=fields["tz_offset"],
                message=fields["message"],
            )
            self._commits[sha] = meta
        return meta

    def tree(self, tree_sha: str) -> list:
        entries = self._trees.get(tree_sha)
        if entries is None:
            entries = gitdb.parse_tree(self.store.get(tree_sha, gitdb.OBJ_TREE))
            self._trees.put(tree_sha, entries)
        return entries

    def blob(self, blob_sha: str) -> bytes:
        return self.store.get(blob_sha, gitdb.OBJ_BLOB)

    def branches(self) -> dict:
        return gitdb.read_branches(self.git_dir)

    def path_entry(self, tree_sha: str, path: bytes):
        """(mode, sha) for a path under a tree, or None if absent."""
        parts = path.split(b"/")
        cur = tree_sha
        for i, part in enumerate(parts):
            found = None
            for mode, name, sha in self.tree(cur):
                if name == part:
                    found = (mode, sha)
                    break
            if found is None:
                return None
            mode, sha = found
            if i + 1 == len(parts):
                return found
            if (mode >> 12) != 0o04:  # not a directory
                return None
            cur = sha
        return None

    def list_files(self, tree_sha: str) -> list:
        """All blobs under a tree as (path bytes, mode, sha), tree order."""
        out = []
        self._collect(tree_sha, b"", out)
        return out

    def _collect(self, tree_sha, prefix, out):
        for mode, name, sha in self.tree(tree_sha):
            if mode == _GITLINK:
                continue
            full = prefix + name
            if (mode >> 12) == 0o04:
                self._collect(sha, full + b"/", out)
            else:
                out.append((full, mode, sha))


def open_repository(path) -> RepositoryHandle:
    return RepositoryHandle(path)


def resolve_branches(handle: RepositoryHandle, names=None) -> list:
    """Branch tips as [(name, sha)] in lexicographic name order.

    names None or empty selects every local branch; unknown names raise
    UnknownBranch listing all of them.
    """
    available = handle.branches()
    if not names:
        return sorted(available.items())
    missing = sorted(set(names) - set(available))
    if missing:
        raise UnknownBranch(missing)
    return sorted((name, available[name]) for name in set(names))


def walk_commit_pairs(handle: RepositoryHandle, tips, include_merge_parents=False):
    """First-parent commit pairs over the given tips, each commit once.

    Tips are processed in the given order with a shared visited set, so a
    commit reachable from several branches is paired exactly once. With
    include_merge_parents, extra pairs for a merge's later parents follow
    its first-parent pair.
    """
    visited = set()
    for _name, tip in tips:
        cur = tip
        while cur is not None and cur not in visited:
            meta = handle.commit(cur)
            visited.add(cur)
            if meta.parent_shas:
                yield CommitPair(meta, handle.commit(meta.parent_shas[0]))
                if include_merge_parents:
                    for extra in meta.parent_shas[1:]:
                        yield CommitPair(meta, handle.commit(extra))
                cur = meta.parent_shas[0]
            else:
                yield CommitPair(meta, None)
                cur = None


def is_binary(data: bytes) -> bool:
    return b"\x00" in data[:8000]


def split_lines(data: bytes) -> list:
    """Split on \\n only, keeping terminators; a final unterminated line counts."""
    if not data:
        return []
    parts = data.split(b"\n")
    last = parts.pop()
    lines = [p + b"\n" for p in parts]
    if last:
        lines.append(last)
    return lines


def count_lines(data: bytes) -> int:
    if not data:
        return 0
    n = data.count(b"\n")
    return n if data.endswith(b"\n") else n + 1


def _regions_to_hunks(regions):
    hunks = []
    for i1, i2, j1, j2 in regions:
        old_len = i2 - i1
        new_len = j2 - j1
        old_start = i1 + 1 if old_len else i1
        new_start = j1 + 1 if new_len else j1
        hunks.append((old_start, old_len, new_start, new_len))
    return tuple(hunks)


def diff_blobs(old_data: bytes, new_data: bytes) -> tuple:
    """Line hunks between two text blobs as (old_start, old_len, new_start, new_len).

    Starts are 1-based; a zero-length side anchors after the given line of the
    other version (0 means before the first line).
    """
    old_lines = split_lines(old_data)
    new_lines = split_lines(new_data)
    tokens = {}
    a = [tokens.setdefault(ln, len(tokens)) for ln in old_lines]
    b = [tokens.setdefault(ln, len(tokens)) for ln in new_lines]
    return _regions_to_hunks(kernels.diff_regions(a, b))


def _decode_path(path: bytes) -> str:
    return path.decode("utf-8", "replace")


def _tree_changes(handle, old_tree, new_tree, prefix, out):
    """Merge-walk two trees, collecting (op, path, old sha, new sha, old mode, new mode)."""
    old_entries = handle.tree(old_tree) if old_tree else []
    new_entries = handle.tree(new_tree) if new_tree else []
    i = j = 0
    while i < len(old_entries) or j < len(new_entries):
        if i < len(old_entries):
            omode, oname, osha = old_entries[i]
            okey = oname + b"/" if (omode >> 12) == 0o04 else oname
        else:
            okey = None
        if j < len(new_entries):
            nmode, nname, nsha = new_entries[j]
            nkey = nname + b"/" if (nmode >> 12) == 0o04 else nname
        else:
            nkey = None
        if okey is not None and (nkey is None or okey < nkey):
            _emit_side(handle, "D", omode, prefix + oname, osha, out)
            i += 1
        elif nkey is not None and (okey is None or nkey < okey):
            _emit_side(handle, "A", nmode, prefix + nname, nsha, out)
            j += 1
        else:
            odir = (omode >> 12) == 0o04
            ndir = (nmode >> 12) == 0o04
            path = prefix + oname
            if odir and ndir:
                if osha != nsha:
                    _tree_changes(handle, osha, nsha, path + b"/", out)
            elif odir != ndir:
                _emit_side(handle, "D", omode, path, osha, out)
                _emit_side(handle, "A", nmode, path, nsha, out)
            else:
                if omode != _GITLINK and nmode != _GITLINK:
                    if osha != nsha or omode != nmode:
                        out.append(("M", path, osha, nsha))
                elif omode != nmode:
                    if omode != _GITLINK:
                        _emit_side(handle, "D", omode, path, osha, out)
                    if nmode != _GITLINK:
                        _emit_side(handle, "A", nmode, path, nsha, out)
            i += 1
            j += 1


def _emit_side(handle, op, mode, path, sha, out):
    if mode == _GITLINK:
        return
    if (mode >> 12) == 0o04:
        for sub_path, sub_mode, sub_sha in handle.list_files(sha):
            if op == "A":
                out.append(("A", path + b"/" + sub_path, None, sub_sha))
            else:
                out.append(("D", path + b"/" + sub_path, sub_sha, None))
    elif op == "A":
        out.append(("A", path, None, sha))
    else:
        out.append(("D", path, sha, None))


def _detect_renames(handle, raw, rename_threshold):
    """Turn matching D/A entries into renames. Returns (changes, renames).

    changes entries are (op, path, old sha, new sha); renames are
    (old path, old sha, new path, new sha).
    """
    dels = [(path, sha) for op, path, sha, _ in raw if op == "D"]
    adds = [(path, sha) for op, path, _, sha in raw if op == "A"]
    if not dels or not adds:
        return raw, []
    used_del = set()
    used_add = set()
    renames = []
    by_sha = {}
    for path, sha in dels:
        by_sha.setdefault(sha, []).append(path)
    for pos, (path, sha) in enumerate(adds):
        bucket = by_sha.get(sha)
        if bucket:
            old_path = bucket.pop(0)
            renames.append((old_path, sha, path, sha))
            used_del.add(old_path)
            used_add.add(pos)
    rest_dels = [(p, s) for p, s in dels if p not in used_del]
    rest_adds = [(pos, p, s) for pos, (p, s) in enumerate(adds) if pos not in used_add]
    if (
        rest_dels
        and rest_adds
        and rename_threshold <= 100
        and len(rest_dels) * len(rest_adds) <= _RENAME_CANDIDATE_CAP
    ):
        blobs = {}

        def load(sha):
            data = blobs.get(sha)
            if data is None:
                data = handle.blob(sha)
                blobs[sha] = data
            return data

        scored = []
        for dpath, dsha in rest_dels:
            for pos, apath, asha in rest_adds:
                score = kernels.similarity_percent(load(dsha), load(asha))
                if score >= rename_threshold:
                    scored.append((-score, dpath, apath, dsha, asha, pos))
        scored.sort()
        taken_add = set()
        for _neg, dpath, apath, dsha, asha, pos in scored:
            if dpath in used_del or pos in taken_add:
                continue
            renames.append((dpath, dsha, apath, asha))
            used_del.add(dpath)
            taken_add.add(pos)
            used_add.add(pos)
    changes = []
    add_pos = -1
    for op, path, osha, nsha in raw:
        if op == "A":
            add_pos += 1
            if add_pos in used_add:
                continue
        elif op == "D" and path in used_del:
            continue
        changes.append((op, path, osha, nsha))
    return changes, renames


def compute_diff(handle: RepositoryHandle, pair: CommitPair,
                 rename_threshold: int = 50, with_hunks: bool = True) -> tuple:
    """File changes between a pair's parent and current trees.

    Renames pair a deleted path with an added one at content similarity >=
    rename_threshold (percent). Binary files report their kind with empty
    hunks. Result is sorted by path.
    """
    old_tree = pair.parent.tree_sha if pair.parent else None
    raw = []
    _tree_changes(handle, old_tree, pair.current.tree_sha, b"", raw)
    plain, renames = _detect_renames(handle, raw, rename_threshold)
    changes = []
    for op, path, osha, nsha in plain:
        if op == "A":
            changes.append(_blob_change(handle, ADD, None, path, None, nsha, with_hunks))
        elif op == "D":
            changes.append(_blob_change(handle, DELETE, path, None, osha, None, with_hunks))
        else:
            changes.append(_blob_change(handle, MODIFY, path, path, osha, nsha, with_hunks))
    for old_path, osha, new_path, nsha in renames:
        changes.append(_blob_change(handle, RENAME, old_path, new_path, osha, nsha, with_hunks))
    changes.sort(key=lambda c: (c.new_path if c.new_path is not None else c.old_path, c.kind))
    return tuple(changes)


def _blob_change(handle, kind, old_path, new_path, old_sha, new_sha, with_hunks):
    old_s = _decode_path(old_path) if old_path is not None else None
    new_s = _decode_path(new_path) if new_path is not None else None
    if not with_hunks:
        return FileChange(kind, old_s, new_s, (), False)
    if old_sha == new_sha and kind in (MODIFY, RENAME):
        return FileChange(kind, old_s, new_s, (), False)
    old_data = handle.blob(old_sha) if old_sha else b""
    new_data = handle.blob(new_sha) if new_sha else b""
    if is_binary(old_data) or is_binary(new_data):
        return FileChange(kind, old_s, new_s, (), True)
    if kind == ADD:
        n = count_lines(new_data)
        hunks = ((0, 0, 1, n),) if n else ()
    elif kind == DELETE:
        n = count_lines(old_data)
        hunks = ((1, n, 0, 0),) if n else ()
    else:
        hunks = diff_blobs(old_data, new_data)
    return FileChange(kind, old_s, new_s, hunks, False)


def map_lines_back(remaining, hunks):
    """Push (origin line, position) pairs through one change's hunks.

    remaining must be ordered by position. Returns (attributed origins,
    pairs repositioned in the parent version).
    """
    attributed = []
    passed = []
    hi = 0
    delta = 0
    nh = len(hunks)
    for orig, pos in remaining:
        while hi < nh:
            _os, ol, ns, nl = hunks[hi]
            if (nl > 0 and ns + nl - 1 < pos) or (nl == 0 and ns < pos):
                delta += nl - ol
                hi += 1
            else:
                break
        if hi < nh:
            _os, ol, ns, nl = hunks[hi]
            if nl > 0 and ns <= pos < ns + nl:
                attributed.append(orig)
                continue
        passed.append((orig, pos - delta))
    return attributed, passed


def blame_file(handle: RepositoryHandle, commit_sha: str, path: str,
               rename_threshold: int = 50) -> list:
    """Attribute each line of path at commit_sha to its introducing commit.

    Follows the first-parent chain and renames. Raises FileNotInTree when the
    path is absent and BinaryFile for binary content.
    """
    meta = handle.commit(commit_sha)
    path_b = path.encode("utf-8")
    entry = handle.path_entry(meta.tree_sha, path_b)
    if entry is None or (entry[0] >> 12) == 0o04 or entry[0] == _GITLINK:
        raise FileNotInTree(f"{path} not in tree of {commit_sha}")
    data = handle.blob(entry[1])
    if is_binary(data):
        raise BinaryFile(f"{path} at {commit_sha} is binary")
    n = count_lines(data)
    remaining = [(i, i) for i in range(1, n + 1)]
    owner = {}
    cur = meta
    cur_path = path_b
    cur_sha = entry[1]
    while remaining:
        parent = handle.commit(cur.parent_shas[0]) if cur.parent_shas else None
        parent_entry = handle.path_entry(parent.tree_sha, cur_path) if parent else None
        if parent_entry is not None and (parent_entry[0] >> 12) != 0o04 \
                and parent_entry[0] != _GITLINK:
            if parent_entry[1] == cur_sha:
                cur = parent
                continue
            old_data = handle.blob(parent_entry[1])
            new_data = handle.blob(cur_sha)
            if is_binary(old_data) or is_binary(new_data):
                hit, remaining = [o for o, _ in remaining], []
            else:
                hit, remaining = map_lines_back(remaining, diff_blobs(old_data, new_data))
            for orig in hit:
                owner[orig] = cur
            cur_sha = parent_entry[1]
            cur = parent
            continue
        # path absent at the parent: an add or a rename happened here
        change = None
        for c in compute_diff(handle, CommitPair(cur, parent), rename_threshold):
            if c.new_path == _decode_path(cur_path):
                change = c
                break
        if change is None or change.kind == ADD or change.binary:
            for orig, _pos in remaining:
                owner[orig] = cur
            break
        hit, remaining = map_lines_back(remaining, change.hunks)
        for orig in hit:
            owner[orig] = cur
        cur_path = change.old_path.encode("utf-8")
        old_entry = handle.path_entry(parent.tree_sha, cur_path)
        cur_sha = old_entry[1] if old_entry else None
        cur = parent
    return [
        LineAttribution(i, owner[i].sha, owner[i].author_name, owner[i].author_email)
        for i in sorted(owner)
    ]
