"""Shared test utilities: scripted git repositories and git CLI oracles.

The oracle functions rebuild expected answers purely from `git` plumbing
output, never through the package under test, so each comparison pits two
independent routes against each other.
"""

import os
import re
import subprocess
from pathlib import Path

from sociogit import repo as repo_mod
from sociogit.mappers import IdRegistry, user_key
from sociogit.miners import MiningData

DEV0 = ("Alice Dev", "alice@example.com")
DEV1 = ("Bob Dev", "bob@example.com")
DEV2 = ("Carol Dev", "carol@example.com")


def git(repo_dir, *args, data=None, env_extra=None, check=True):
    env = dict(os.environ, **env_extra) if env_extra else None
    proc = subprocess.run(
        ["git", "-C", str(repo_dir), *args],
        input=data, capture_output=True, check=check, env=env,
    )
    return proc.stdout


class RepoBuilder:
    """Scripts a repository through the git CLI with a fixed clock."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.clock = 1_700_000_000
        git(self.path, "init", "-q", "-b", "main")
        git(self.path, "config", "user.name", DEV0[0])
        git(self.path, "config", "user.email", DEV0[1])

    def git(self, *args, **kwargs):
        return git(self.path, *args, **kwargs)

    def write(self, rel, content):
        p = self.path / rel
        p.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(content, str):
            content = content.encode()
        p.write_bytes(content)

    def chmod_exec(self, rel):
        p = self.path / rel
        p.chmod(p.stat().st_mode | 0o111)

    def remove(self, rel):
        self.git("rm", "-q", rel)

    def move(self, old, new):
        (self.path / new).parent.mkdir(parents=True, exist_ok=True)
        self.git("mv", old, new)

    def commit(self, message, author=DEV0, tz="+0000", when=None,
               allow_empty=False):
        if when is None:
            self.clock += 3600
            when = self.clock
        else:
            self.clock = max(self.clock, when)
        name, email = author
        date = f"{when} {tz}"
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_DATE": date,
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_DATE": date,
        }
        self.git("add", "-A")
        args = ["commit", "-q", "-m", message]
        if allow_empty:
            args.append("--allow-empty")
        self.git(*args, env_extra=env)
        return self.head()

    def merge(self, other, message, author=DEV0, tz="+0000"):
        self.clock += 3600
        name, email = author
        date = f"{self.clock} {tz}"
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_DATE": date,
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_DATE": date,
        }
        self.git("merge", "-q", "--no-ff", "--no-edit", "-m", message, other,
                 env_extra=env)
        return self.head()

    def branch(self, name, at=None):
        self.git("branch", name, *([at] if at else []))

    def checkout(self, name):
        self.git("checkout", "-q", name)

    def head(self):
        return self.git("rev-parse", "HEAD").decode().strip()


# ---------------------------------------------------------------------------
# git CLI oracles


def rev_list_first_parent(repo_dir, tip):
    return git(repo_dir, "rev-list", "--first-parent", tip).decode().split()


def local_branches(repo_dir):
    """[(name, tip sha)] sorted by name, from for-each-ref."""
    out = git(repo_dir, "for-each-ref", "--format=%(refname:short) %(objectname)",
              "refs/heads")
    tips = []
    for line in out.decode().splitlines():
        name, sha = line.rsplit(" ", 1)
        tips.append((name, sha))
    return sorted(tips)


def walk_order_oracle(repo_dir, tips):
    """Documented traversal order rebuilt from rev-list --first-parent."""
    order = []
    seen = set()
    for tip in tips:
        for sha in rev_list_first_parent(repo_dir, tip):
            if sha in seen:
                break
            seen.add(sha)
            order.append(sha)
    return order


_STATUS_RE = re.compile(r"^(A|M|D|R\d*)\t([^\t]+)(?:\t([^\t]+))?$")


def diff_tree_changes(repo_dir, sha, parent=None, threshold=50):
    """(kind, old_path, new_path) rows for one commit pair, via diff-tree."""
    if parent is None:
        out = git(repo_dir, "diff-tree", "-r", f"-M{threshold}%", "--root",
                  "--no-commit-id", "--name-status", sha)
    else:
        out = git(repo_dir, "diff-tree", "-r", f"-M{threshold}%",
                  "--no-commit-id", "--name-status", parent, sha)
    rows = []
    for line in out.decode().splitlines():
        m = _STATUS_RE.match(line)
        if m is None:
            continue
        kind, p1, p2 = m.group(1)[0], m.group(2), m.group(3)
        if kind == "R":
            rows.append(("RENAME", p1, p2))
        elif kind == "A":
            rows.append(("ADD", None, p1))
        elif kind == "D":
            rows.append(("DELETE", p1, None))
        else:
            rows.append(("MODIFY", p1, p1))
    return rows


def commit_fields(repo_dir, sha):
    out = git(repo_dir, "log", "-1", "--date=raw",
              "--format=%an%x00%ae%x00%ad%x00%P%x00%B", sha)
    name, email, raw_date, parents, message = out.decode().split("\x00", 4)
    ts, tz = raw_date.split()
    sign = -1 if tz[0] == "-" else 1
    offset = sign * (int(tz[1:3]) * 60 + int(tz[3:5]))
    return {
        "name": name,
        "email": email,
        "time": int(ts),
        "tz": offset,
        "parents": parents.split(),
        "message": message,
    }


_BLAME_HEAD_RE = re.compile(rb"^[0-9a-f]{40} \d+ \d+")


def blame_attributions(repo_dir, rev, path):
    """[(final line no, sha, author email)] from blame --line-porcelain."""
    out = git(repo_dir, "blame", "--line-porcelain", rev, "--", path)
    rows = []
    sha = mail = final = None
    for raw in out.split(b"\n"):
        if raw.startswith(b"\t"):
            rows.append((final, sha, mail))
        elif _BLAME_HEAD_RE.match(raw):
            parts = raw.decode().split()
            sha = parts[0]
            final = int(parts[2])
        elif raw.startswith(b"author-mail "):
            mail = raw.decode("utf-8", "replace").split(" ", 1)[1].strip("<>")
    return rows


_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def diff_hunks(repo_dir, old_rev, new_rev, path=None, old_path=None):
    """(old_start, old_len, new_start, new_len) hunks from a -U0 diff."""
    args = ["diff", "-U0", "-M50%", old_rev, new_rev]
    if path is not None:
        args += ["--", path] if old_path is None else ["--", old_path, path]
    out = git(repo_dir, *args)
    hunks = []
    for line in out.decode("utf-8", "replace").splitlines():
        m = _HUNK_RE.match(line)
        if m:
            old_len = 1 if m.group(2) is None else int(m.group(2))
            new_len = 1 if m.group(4) is None else int(m.group(4))
            hunks.append((int(m.group(1)), old_len, int(m.group(3)), new_len))
    return hunks


def binary_paths(repo_dir, old_rev, new_rev):
    """Paths whose change between two revs is binary, per --numstat."""
    out = git(repo_dir, "diff", "--numstat", old_rev, new_rev)
    binaries = set()
    for line in out.decode().splitlines():
        added, _removed, path = line.split("\t", 2)
        if added == "-":
            binaries.add(path)
    return binaries


# ---------------------------------------------------------------------------
# package-side plumbing shared by miner tests


def mining_data(repo_path, branches=None, include_merge_parents=False,
                rename_threshold=50, aliases=None):
    """Registries plus MiningData the same way the pipeline assembles them."""
    handle = repo_mod.open_repository(repo_path)
    tips = repo_mod.resolve_branches(handle, branches)
    pairs = list(repo_mod.walk_commit_pairs(handle, tips, include_merge_parents))
    commits = IdRegistry("COMMIT")
    users = IdRegistry("USER")
    files = IdRegistry("FILE")
    for pair in pairs:
        commits.add(pair.current.sha)
        users.add(user_key(pair.current.author_name, pair.current.author_email,
                           aliases))
    changes = []
    for pair in pairs:
        row = repo_mod.compute_diff(handle, pair, rename_threshold)
        for c in row:
            if c.old_path is not None:
                files.add(c.old_path)
            if c.new_path is not None:
                files.add(c.new_path)
        changes.append(row)
    return handle, tips, MiningData(pairs, changes, commits, files, users, aliases)


def naive_pagerank(graph, damping=0.85, tol=1e-9, max_iter=100):
    """Dict-based power iteration, written straight from the update rule."""
    nodes = set(graph)
    for targets in graph.values():
        nodes.update(targets)
    n = len(nodes)
    out = {v: sorted(set(graph.get(v, ()))) for v in nodes}
    rank = {v: 1.0 / n for v in nodes}
    for _ in range(max_iter):
        new = {v: (1.0 - damping) / n for v in nodes}
        dangling = 0.0
        for v in nodes:
            if out[v]:
                share = rank[v] / len(out[v])
                for t in out[v]:
                    new[t] += damping * share
            else:
                dangling += rank[v]
        boost = damping * dangling / n
        for v in nodes:
            new[v] += boost
        delta = sum(abs(new[v] - rank[v]) for v in nodes)
        rank = new
        if delta < tol:
            break
    return rank
