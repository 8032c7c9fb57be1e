"""Deterministic synthetic repositories with known mining ground truth.

Histories are scripted from a seeded RNG and written in one `git fast-import`
stream. Every generated line is globally unique, so diffs and blame are
unambiguous, and the manifest's per-miner expectations are exact by
construction. Renames are always content-preserving.
"""

import json
import random
import subprocess
from datetime import datetime, timezone
from pathlib import Path

from sociogit.errors import ConfigError, IoError

MANIFEST_NAME = ".synthetic_manifest.json"

_EPOCH_START = 1609718400  # 2021-01-04 00:00 UTC, a Monday
_TZ_POOL = [0, 60, 120, -300, 330, -480, 540]
_DIRS = ["src", "src/core", "lib", "docs", "tests"]
_PLAIN_MESSAGES = [
    "Add parser for {}",
    "Update docs around {}",
    "Refactor {} internals",
    "Improve logging in {}",
    "Tweak {} defaults",
    "Clean up {}",
    "Extend tests for {}",
]
_FIX_MESSAGES = [
    "Fix crash in {}",
    "fix typo in {}",
    "Bugfix: {} off-by-one",
    "Fix race in {}",
    "Hotfix for {}",
]
_TOPICS = ["loader", "cache", "queue", "index", "router", "config", "auth"]


class _TextFile:
    __slots__ = ("lines", "creator", "changes")

    def __init__(self, creator):
        self.lines = []  # (text, mark, email)
        self.creator = creator
        self.changes = {}  # email → commits touching this lineage

    def bump(self, email):
        self.changes[email] = self.changes.get(email, 0) + 1


class _BinaryFile:
    __slots__ = ("content", "creator", "changes")

    def __init__(self, content, creator):
        self.content = content
        self.creator = creator
        self.changes = {}

    def bump(self, email):
        self.changes[email] = self.changes.get(email, 0) + 1


class _Generator:
    def __init__(self, n_commits, n_authors, n_files, seed):
        self.rng = random.Random(seed)
        self.n_commits = n_commits
        self.n_files = n_files
        self.authors = []
        for i in range(n_authors):
            self.authors.append(
                {
                    "name": f"Dev {i}",
                    "email": f"dev{i}@example.com",
                    "tz": self.rng.choice(_TZ_POOL),
                }
            )
        self.files = {}  # live path → _TextFile | _BinaryFile
        self.created = 0
        self.line_counter = 0
        self.rename_counter = 0
        self.binary_counter = 0
        self.clock = _EPOCH_START
        self.stream = []
        self.commits = []
        self.changed_files = {}
        self.assignment = {}
        self.dependency = {}
        self.work_time = {}
        self.influence = {}

    def fresh_line(self) -> str:
        self.line_counter += 1
        return f"l{self.line_counter:06d} {self.rng.getrandbits(32):08x}"

    def fresh_path(self) -> str:
        self.created += 1
        return f"{self.rng.choice(_DIRS)}/f{self.created:04d}.txt"

    def build(self):
        for mark in range(1, self.n_commits + 1):
            self.one_commit(mark)
        self.stream.append(b"done\n")
        return b"".join(self.stream)

    def one_commit(self, mark):
        rng = self.rng
        author = rng.choice(self.authors)
        email = author["email"]
        self.clock += rng.randint(1800, 90000)
        fix = rng.random() < 0.22
        topic = rng.choice(_TOPICS)
        template = rng.choice(_FIX_MESSAGES if fix else _PLAIN_MESSAGES)
        message = template.format(topic)
        ops = self.plan_ops(mark, email)
        commands = []
        changes = []
        introducers = set()
        for op in ops:
            kind = op[0]
            if kind == "create":
                _, path, n_lines = op
                tf = _TextFile(email)
                tf.bump(email)
                for _ in range(n_lines):
                    tf.lines.append((self.fresh_line(), mark, email))
                self.files[path] = tf
                body = "".join(t + "\n" for t, _, _ in tf.lines).encode()
                commands.append(_modify(path, body))
                changes.append({"kind": "ADD", "old": None, "new": path, "binary": False})
            elif kind == "binary-create":
                _, path = op
                self.binary_counter += 1
                content = b"\x00BIN" + self.binary_counter.to_bytes(4, "big") + bytes(
                    rng.randrange(256) for _ in range(32)
                )
                bf = _BinaryFile(content, email)
                bf.bump(email)
                self.files[path] = bf
                commands.append(_modify(path, content))
                changes.append({"kind": "ADD", "old": None, "new": path, "binary": True})
            elif kind == "binary-modify":
                _, path = op
                bf = self.files[path]
                self.binary_counter += 1
                bf.content = b"\x00BIN" + self.binary_counter.to_bytes(4, "big") + bytes(
                    rng.randrange(256) for _ in range(32)
                )
                bf.bump(email)
                commands.append(_modify(path, bf.content))
                changes.append({"kind": "MODIFY", "old": path, "new": path, "binary": True})
            elif kind == "modify":
                _, path, edits = op
                tf = self.files[path]
                tf.bump(email)
                for action, pos, count in edits:
                    if action == "rewrite":
                        for i in range(pos, pos + count):
                            if fix:
                                introducers.add(tf.lines[i][1])
                            tf.lines[i] = (self.fresh_line(), mark, email)
                    elif action == "insert":
                        new = [(self.fresh_line(), mark, email) for _ in range(count)]
                        tf.lines[pos:pos] = new
                    else:  # remove
                        if fix:
                            for i in range(pos, pos + count):
                                introducers.add(tf.lines[i][1])
                        del tf.lines[pos:pos + count]
                body = "".join(t + "\n" for t, _, _ in tf.lines).encode()
                commands.append(_modify(path, body))
                changes.append({"kind": "MODIFY", "old": path, "new": path, "binary": False})
            elif kind == "rename":
                _, old_path, new_path = op
                fobj = self.files.pop(old_path)
                fobj.bump(email)
                self.files[new_path] = fobj
                commands.append(f"R {old_path} {new_path}\n".encode())
                changes.append(
                    {
                        "kind": "RENAME",
                        "old": old_path,
                        "new": new_path,
                        "binary": isinstance(fobj, _BinaryFile),
                    }
                )
            else:  # delete
                _, path = op
                fobj = self.files.pop(path)
                if fix and isinstance(fobj, _TextFile):
                    for _text, line_mark, _email in fobj.lines:
                        introducers.add(line_mark)
                commands.append(f"D {path}\n".encode())
                changes.append(
                    {
                        "kind": "DELETE",
                        "old": path,
                        "new": None,
                        "binary": isinstance(fobj, _BinaryFile),
                    }
                )
        self.emit_commit(mark, author, message, commands)
        self.record_truth(mark, author, message, fix, changes, introducers)

    def plan_ops(self, mark, email):
        rng = self.rng
        if rng.random() < 0.03 and mark > 1:
            return []  # an empty commit now and then
        text_paths = sorted(
            p for p, f in self.files.items() if isinstance(f, _TextFile)
        )
        all_paths = sorted(self.files)
        n_ops = rng.choice((1, 1, 1, 2, 2, 3, 4))
        ops = []
        touched = set()
        for _ in range(n_ops):
            choices = []
            if self.created < self.n_files or not text_paths:
                choices.append(("create", 30 if self.created < self.n_files else 5))
            free_text = [p for p in text_paths if p not in touched]
            free_all = [p for p in all_paths if p not in touched]
            if free_text:
                choices.append(("modify", 55))
            if free_all:
                choices.append(("rename", 8))
                if len(self.files) > 3:
                    choices.append(("delete", 5))
            if self.created < self.n_files:
                choices.append(("binary-create", 4))
            free_bin = [
                p for p in free_all if isinstance(self.files[p], _BinaryFile)
            ]
            if free_bin:
                choices.append(("binary-modify", 4))
            if not choices:
                break
            total = sum(w for _, w in choices)
            pick = rng.randrange(total)
            acc = 0
            op_kind = choices[-1][0]
            for name, w in choices:
                acc += w
                if pick < acc:
                    op_kind = name
                    break
            if op_kind == "create":
                path = self.fresh_path()
                ops.append(("create", path, rng.randint(3, 12)))
                touched.add(path)
            elif op_kind == "binary-create":
                path = f"assets/b{self.created + 1:04d}.bin"
                self.created += 1
                ops.append(("binary-create", path))
                touched.add(path)
            elif op_kind == "binary-modify":
                path = rng.choice(free_bin)
                ops.append(("binary-modify", path))
                touched.add(path)
            elif op_kind == "modify":
                path = rng.choice(free_text)
                tf = self.files[path]
                edits = self.plan_edits(tf)
                if edits:
                    ops.append(("modify", path, edits))
                touched.add(path)
            elif op_kind == "rename":
                path = rng.choice(free_all)
                self.rename_counter += 1
                base = path.rsplit("/", 1)[-1]
                new_path = f"moved/m{self.rename_counter:03d}_{base}"
                ops.append(("rename", path, new_path))
                touched.add(path)
                touched.add(new_path)
            else:
                path = rng.choice(free_all)
                ops.append(("delete", path))
                touched.add(path)
        return ops

    def plan_edits(self, tf):
        """Non-overlapping line edits against one file's current state."""
        rng = self.rng
        n = len(tf.lines)
        edits = []
        if n == 0:
            return [("insert", 0, rng.randint(1, 4))]
        kind = rng.choice(("rewrite", "rewrite", "rewrite", "insert", "remove"))
        if kind == "rewrite":
            count = rng.randint(1, min(3, n))
            pos = rng.randrange(n - count + 1)
            edits.append(("rewrite", pos, count))
        elif kind == "insert":
            edits.append(("insert", rng.randint(0, n), rng.randint(1, 4)))
        else:
            count = rng.randint(1, min(2, n))
            pos = rng.randrange(n - count + 1)
            edits.append(("remove", pos, count))
        return edits

    def emit_commit(self, mark, author, message, commands):
        tz = author["tz"]
        sign = "+" if tz >= 0 else "-"
        zone = f"{sign}{abs(tz) // 60:02d}{abs(tz) % 60:02d}"
        ident = f"{author['name']} <{author['email']}> {self.clock} {zone}"
        msg = message.encode()
        parts = [
            b"commit refs/heads/main\n",
            f"mark :{mark}\n".encode(),
            f"author {ident}\n".encode(),
            f"committer {ident}\n".encode(),
            f"data {len(msg)}\n".encode(),
            msg,
            b"\n",
        ]
        parts.extend(commands)
        parts.append(b"\n")
        self.stream.extend(parts)

    def record_truth(self, mark, author, message, fix, changes, introducers):
        email = author["email"]
        self.commits.append(
            {
                "mark": mark,
                "message": message,
                "authorEmail": email,
                "authorName": author["name"],
                "time": self.clock,
                "tz": author["tz"],
                "fix": fix,
                "changes": changes,
            }
        )
        targets = set()
        changed = self.changed_files.setdefault(email, set())
        assign = self.assignment.setdefault(email, {})
        for change in changes:
            target = change["old"] if change["kind"] == "DELETE" else change["new"]
            targets.add(target)
            changed.add(target)
            if change["kind"] == "RENAME":
                changed.add(change["old"])
            assign[target] = assign.get(target, 0) + 1
        ordered = sorted(targets)
        for i, pa in enumerate(ordered):
            for pb in ordered[i + 1:]:
                key = f"{pa}|{pb}"
                self.dependency[key] = self.dependency.get(key, 0) + 1
        grid = self.work_time.setdefault(email, [[0] * 24 for _ in range(7)])
        local = datetime.fromtimestamp(self.clock + author["tz"] * 60, tz=timezone.utc)
        grid[local.weekday()][local.hour] += 1
        if fix:
            self.influence[str(mark)] = sorted(m for m in introducers if m != mark)

    def manifest(self, mark_to_sha):
        for commit in self.commits:
            commit["sha"] = mark_to_sha[commit["mark"]]
        ownership_files = {}
        ownership_lines = {}
        for path in sorted(self.files):
            fobj = self.files[path]
            ownership_files[path] = {
                "creator": fobj.creator,
                "changes": dict(sorted(fobj.changes.items())),
                "binary": isinstance(fobj, _BinaryFile),
            }
            if isinstance(fobj, _TextFile):
                counts = {}
                for _text, _mark, email in fobj.lines:
                    counts[email] = counts.get(email, 0) + 1
                ownership_lines[path] = dict(sorted(counts.items()))
        return {
            "branch": "main",
            "authors": self.authors,
            "commits": self.commits,
            "markToSha": {str(m): s for m, s in sorted(mark_to_sha.items())},
            "headSha": mark_to_sha[self.n_commits],
            "changedFiles": {
                email: sorted(paths)
                for email, paths in sorted(self.changed_files.items())
            },
            "assignment": {
                email: dict(sorted(row.items()))
                for email, row in sorted(self.assignment.items())
            },
            "dependency": dict(sorted(self.dependency.items())),
            "workTime": dict(sorted(self.work_time.items())),
            "influence": dict(
                sorted(self.influence.items(), key=lambda kv: int(kv[0]))
            ),
            "ownership": {"files": ownership_files, "lines": ownership_lines},
        }


def _modify(path, content: bytes) -> bytes:
    return b"".join(
        [
            f"M 100644 inline {path}\n".encode(),
            f"data {len(content)}\n".encode(),
            content,
            b"\n",
        ]
    )


def generate_synthetic_repo(dest_dir, n_commits, n_authors, n_files, seed=0) -> dict:
    """Create a scripted repository at dest_dir and return its manifest.

    The manifest (also written to .synthetic_manifest.json inside dest_dir)
    carries expected miner results keyed by path/email plus mark→sha ids.
    """
    if min(n_commits, n_authors, n_files) < 1:
        raise ConfigError("synthetic parameters must all be >= 1")
    dest = Path(dest_dir).resolve()
    if dest.exists() and any(dest.iterdir()):
        raise IoError(f"{dest} exists and is not empty")
    dest.mkdir(parents=True, exist_ok=True)
    gen = _Generator(n_commits, n_authors, n_files, seed)
    stream = gen.build()
    marks_path = dest / ".git" / "fastimport.marks"
    try:
        subprocess.run(
            ["git", "init", "-q", "-b", "main", str(dest)],
            check=True, capture_output=True,
        )
        subprocess.run(
            [
                "git", "-C", str(dest), "fast-import", "--quiet", "--done",
                f"--export-marks={marks_path}",
            ],
            input=stream, check=True, capture_output=True,
        )
    except FileNotFoundError as exc:
        raise IoError("git executable not found") from exc
    except subprocess.CalledProcessError as exc:
        raise IoError(
            f"git fast-import failed: {exc.stderr.decode(errors='replace')}"
        ) from exc
    mark_to_sha = {}
    for line in marks_path.read_text().splitlines():
        mark, sha = line.split()
        mark_to_sha[int(mark.lstrip(":"))] = sha
    manifest = gen.manifest(mark_to_sha)
    manifest["params"] = {
        "nCommits": n_commits,
        "nAuthors": n_authors,
        "nFiles": n_files,
        "seed": seed,
    }
    with open(dest / MANIFEST_NAME, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")
    return manifest
