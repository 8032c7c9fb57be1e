"""Walking, diffing, and blame, validated against the git CLI on scripted repos."""

import itertools
import random

import pytest

from sociogit.errors import BinaryFile, FileNotInTree, NotARepository, UnknownBranch
from sociogit.repo import (
    ADD,
    DELETE,
    MODIFY,
    RENAME,
    CommitPair,
    blame_file,
    compute_diff,
    count_lines,
    diff_blobs,
    is_binary,
    map_lines_back,
    open_repository,
    resolve_branches,
    split_lines,
    walk_commit_pairs,
)

from helpers import (
    DEV0,
    DEV1,
    binary_paths,
    blame_attributions,
    commit_fields,
    diff_hunks,
    diff_tree_changes,
    git,
    rev_list_first_parent,
    walk_order_oracle,
)


def change_rows(changes):
    return sorted((c.kind, c.old_path, c.new_path) for c in changes)


def single_pair(handle, new_sha, old_sha=None):
    parent = handle.commit(old_sha) if old_sha else None
    return CommitPair(handle.commit(new_sha), parent)


# -- walking ---------------------------------------------------------------


def test_walk_linear_history(build_repo):
    b = build_repo()
    shas = []
    for n in range(3):
        b.write("notes.txt", f"revision {n}\n")
        shas.append(b.commit(f"Revision {n}"))
    c1, c2, c3 = shas
    handle = open_repository(b.path)
    tips = resolve_branches(handle)
    assert tips == [("main", c3)]
    pairs = list(walk_commit_pairs(handle, tips))
    assert [(p.current.sha, p.parent.sha if p.parent else None) for p in pairs] == [
        (c3, c2),
        (c2, c1),
        (c1, None),
    ]
    assert [p.current.sha for p in pairs] == rev_list_first_parent(b.path, c3)


def test_walk_shared_root_visits_each_commit_once(build_repo):
    b = build_repo()
    b.write("base.txt", "base\n")
    c1 = b.commit("Base")
    b.write("trunk.txt", "trunk\n")
    c2 = b.commit("Trunk work")
    b.branch("side", at=c1)
    b.checkout("side")
    b.write("side.txt", "side\n")
    c3 = b.commit("Side work")
    b.checkout("main")

    handle = open_repository(b.path)
    tips = resolve_branches(handle)
    assert tips == [("main", c2), ("side", c3)]
    pairs = list(walk_commit_pairs(handle, tips))
    assert len(pairs) == 3
    currents = [p.current.sha for p in pairs]
    assert currents == walk_order_oracle(b.path, [c2, c3])
    assert currents.count(c1) == 1


def test_walk_merge_parent_handling(build_repo):
    b = build_repo()
    b.write("base.txt", "base\n")
    c1 = b.commit("Base")
    b.branch("side")
    b.checkout("side")
    b.write("side.txt", "side\n")
    c2b = b.commit("Side work")
    b.checkout("main")
    b.write("trunk.txt", "trunk\n")
    c2a = b.commit("Trunk work")
    m = b.merge("side", "Merge side work")

    handle = open_repository(b.path)
    tips = resolve_branches(handle, ["main"])
    first_parent = [
        (p.current.sha, p.parent.sha if p.parent else None)
        for p in walk_commit_pairs(handle, tips)
    ]
    assert first_parent == [(m, c2a), (c2a, c1), (c1, None)]

    with_extras = [
        (p.current.sha, p.parent.sha if p.parent else None)
        for p in walk_commit_pairs(handle, tips, include_merge_parents=True)
    ]
    assert with_extras == [(m, c2a), (m, c2b), (c2a, c1), (c1, None)]


def test_resolve_branches_validation(build_repo):
    b = build_repo()
    b.write("a.txt", "x\n")
    c1 = b.commit("One")
    b.branch("side")
    handle = open_repository(b.path)
    assert resolve_branches(handle, ["side", "main"]) == [("main", c1), ("side", c1)]
    with pytest.raises(UnknownBranch) as err:
        resolve_branches(handle, ["zygote", "absent", "main"])
    assert err.value.missing == ["absent", "zygote"]


def test_empty_repository_has_no_branches(build_repo):
    b = build_repo()
    handle = open_repository(b.path)
    tips = resolve_branches(handle)
    assert tips == []
    assert list(walk_commit_pairs(handle, tips)) == []


def test_open_repository_rejects_plain_directory(tmp_path):
    with pytest.raises(NotARepository):
        open_repository(tmp_path)


def test_commit_metadata_fields(build_repo):
    b = build_repo()
    b.write("a.txt", "x\n")
    sha = b.commit("Subject\n\nLonger body.", author=DEV1, tz="+0545")
    meta = open_repository(b.path).commit(sha)
    oracle = commit_fields(b.path, sha)
    assert meta.author_name == oracle["name"] == DEV1[0]
    assert meta.author_email == oracle["email"] == DEV1[1]
    assert meta.author_time == oracle["time"]
    assert meta.tz_offset == oracle["tz"] == 5 * 60 + 45
    assert meta.message.strip() == oracle["message"].strip()


# -- diffing ---------------------------------------------------------------


def test_diff_root_commit_is_an_add(build_repo):
    b = build_repo()
    b.write("f.txt", "one\ntwo\nthree\n")
    sha = b.commit("Start")
    handle = open_repository(b.path)
    changes = compute_diff(handle, single_pair(handle, sha))
    assert change_rows(changes) == [(ADD, None, "f.txt")]
    assert [tuple(h) for h in changes[0].hunks] == [(0, 0, 1, 3)]
    assert changes[0].binary is False
    assert changes[0].path == "f.txt"


def test_diff_empty_commit_has_no_changes(build_repo):
    b = build_repo()
    b.write("f.txt", "x\n")
    c1 = b.commit("One")
    c2 = b.commit("Nothing new", allow_empty=True)
    handle = open_repository(b.path)
    assert len(compute_diff(handle, single_pair(handle, c2, c1))) == 0


def test_diff_exact_rename(build_repo):
    b = build_repo()
    b.write("old.txt", "alpha\nbeta\ngamma\n")
    c1 = b.commit("One")
    b.move("old.txt", "archive/new.txt")
    c2 = b.commit("Relocate")
    handle = open_repository(b.path)
    changes = compute_diff(handle, single_pair(handle, c2, c1))
    assert change_rows(changes) == [(RENAME, "old.txt", "archive/new.txt")]
    assert changes[0].hunks == ()
    assert changes[0].binary is False
    assert change_rows(changes) == diff_tree_changes(b.path, c2, c1)


def test_diff_rename_with_small_edit(build_repo):
    b = build_repo()
    lines = [f"content row {i}" for i in range(10)]
    b.write("old.txt", "\n".join(lines) + "\n")
    c1 = b.commit("One")
    b.move("old.txt", "new.txt")
    lines[4] = "content row four, revised"
    b.write("new.txt", "\n".join(lines) + "\n")
    c2 = b.commit("Move and tweak")
    handle = open_repository(b.path)
    changes = compute_diff(handle, single_pair(handle, c2, c1))
    assert change_rows(changes) == [(RENAME, "old.txt", "new.txt")]
    assert change_rows(changes) == diff_tree_changes(b.path, c2, c1)
    ours = [tuple(h) for h in changes[0].hunks]
    assert ours == diff_hunks(b.path, c1, c2, path="new.txt", old_path="old.txt")
    assert ours == [(5, 1, 5, 1)]


def test_diff_rewrite_below_threshold_is_delete_plus_add(build_repo):
    b = build_repo()
    b.write("old.txt", "\n".join(f"original {i}" for i in range(10)) + "\n")
    c1 = b.commit("One")
    b.remove("old.txt")
    b.write("new.txt", "\n".join(f"unrelated {i}" for i in range(10)) + "\n")
    c2 = b.commit("Replace wholesale")
    handle = open_repository(b.path)
    changes = compute_diff(handle, single_pair(handle, c2, c1))
    assert change_rows(changes) == [
        (ADD, None, "new.txt"),
        (DELETE, "old.txt", None),
    ]
    assert change_rows(changes) == sorted(diff_tree_changes(b.path, c2, c1))


def test_diff_binary_files(build_repo):
    b = build_repo()
    b.write("blob.bin", b"\x00\x01\x02run one\x00")
    c1 = b.commit("Binary add")
    b.write("blob.bin", b"\x00\x01\x03run two, longer\x00\xff")
    c2 = b.commit("Binary modify")
    handle = open_repository(b.path)

    adds = compute_diff(handle, single_pair(handle, c1))
    assert change_rows(adds) == [(ADD, None, "blob.bin")]
    assert adds[0].binary is True
    assert adds[0].hunks == ()

    mods = compute_diff(handle, single_pair(handle, c2, c1))
    assert change_rows(mods) == [(MODIFY, "blob.bin", "blob.bin")]
    assert mods[0].binary is True
    assert mods[0].hunks == ()
    assert "blob.bin" in binary_paths(b.path, c1, c2)


def test_diff_mode_only_change(build_repo):
    b = build_repo()
    b.write("run.sh", "#!/bin/sh\nexit 0\n")
    c1 = b.commit("One")
    b.chmod_exec("run.sh")
    c2 = b.commit("Make executable")
    handle = open_repository(b.path)
    changes = compute_diff(handle, single_pair(handle, c2, c1))
    assert change_rows(changes) == [(MODIFY, "run.sh", "run.sh")]
    assert changes[0].hunks == ()
    assert changes[0].binary is False
    assert change_rows(changes) == diff_tree_changes(b.path, c2, c1)


def test_diff_kinds_match_git_across_synthetic_history(synth_repo):
    dest, _manifest = synth_repo
    handle = open_repository(dest)
    tips = resolve_branches(handle)
    checked = 0
    for pair in walk_commit_pairs(handle, tips):
        parent_sha = pair.parent.sha if pair.parent else None
        ours = change_rows(compute_diff(handle, pair))
        oracle = sorted(diff_tree_changes(dest, pair.current.sha, parent_sha))
        assert ours == oracle, pair.current.sha
        checked += 1
    assert checked == 40


def test_hunks_match_git_on_random_edits(build_repo):
    rng = random.Random(1234)
    counter = itertools.count()

    def fresh(k):
        return [f"uniq-{next(counter):05d}" for _ in range(k)]

    b = build_repo()
    lines = fresh(30)
    b.write("story.txt", "\n".join(lines) + "\n")
    prev = b.commit("Seed story")
    handle = open_repository(b.path)
    for round_no in range(20):
        new = list(lines)
        for _ in range(rng.randint(1, 3)):
            op = rng.choice(("delete", "insert", "replace"))
            if op == "delete" and len(new) > 6:
                i = rng.randrange(0, len(new) - 3)
                del new[i:i + rng.randint(1, 3)]
            elif op == "insert":
                i = rng.randrange(0, len(new) + 1)
                new[i:i] = fresh(rng.randint(1, 3))
            else:
                i = rng.randrange(0, len(new))
                new[i:i + rng.randint(1, 2)] = fresh(rng.randint(1, 2))
        if new == lines:
            new.extend(fresh(1))
        b.write("story.txt", "\n".join(new) + "\n")
        sha = b.commit(f"Edit {round_no}")
        changes = compute_diff(handle, single_pair(handle, sha, prev))
        assert change_rows(changes) == [(MODIFY, "story.txt", "story.txt")]
        ours = [tuple(h) for h in changes[0].hunks]
        assert ours == diff_hunks(b.path, prev, sha, path="story.txt"), round_no
        lines, prev = new, sha


# -- blame -----------------------------------------------------------------


def test_blame_single_author_file(build_repo):
    b = build_repo()
    b.write("f.txt", "first\nsecond\n")
    c1 = b.commit("One")
    b.write("g.txt", "unrelated\n")
    c2 = b.commit("Two")
    handle = open_repository(b.path)
    rows = blame_file(handle, c2, "f.txt")
    assert [(r.line_no, r.introducing_sha) for r in rows] == [(1, c1), (2, c1)]
    assert all(r.author_name == DEV0[0] and r.author_email == DEV0[1] for r in rows)


def test_blame_attributes_rewritten_line(build_repo):
    b = build_repo()
    b.write("f.txt", "one\ntwo\nthree\n")
    c1 = b.commit("One")
    b.write("f.txt", "one\nTWO!\nthree\n")
    c2 = b.commit("Two", author=DEV1)
    handle = open_repository(b.path)
    rows = blame_file(handle, c2, "f.txt")
    assert [(r.line_no, r.introducing_sha) for r in rows] == [(1, c1), (2, c2), (3, c1)]
    oracle = blame_attributions(b.path, c2, "f.txt")
    assert [(r.line_no, r.introducing_sha, r.author_email) for r in rows] == oracle


def test_blame_follows_renames(build_repo):
    b = build_repo()
    b.write("a.txt", "keep one\nkeep two\nchange me\n")
    c1 = b.commit("One")
    b.move("a.txt", "b.txt")
    c2 = b.commit("Rename only")
    b.write("b.txt", "keep one\nkeep two\nchanged here\n")
    c3 = b.commit("Edit after rename", author=DEV1)
    handle = open_repository(b.path)
    rows = blame_file(handle, c3, "b.txt")
    assert [(r.line_no, r.introducing_sha) for r in rows] == [(1, c1), (2, c1), (3, c3)]
    assert c2 not in {r.introducing_sha for r in rows}
    oracle = blame_attributions(b.path, c3, "b.txt")
    assert [(r.line_no, r.introducing_sha, r.author_email) for r in rows] == oracle


def test_blame_error_cases(build_repo):
    b = build_repo()
    b.write("dir/inner.txt", "x\n")
    b.write("raw.bin", b"\x00\x01data\x00")
    sha = b.commit("One")
    handle = open_repository(b.path)
    with pytest.raises(FileNotInTree):
        blame_file(handle, sha, "missing.txt")
    with pytest.raises(FileNotInTree):
        blame_file(handle, sha, "dir")
    with pytest.raises(BinaryFile):
        blame_file(handle, sha, "raw.bin")


def test_blame_matches_git_on_synthetic_head(synth_repo):
    dest, manifest = synth_repo
    handle = open_repository(dest)
    head = manifest["headSha"]
    paths = git(dest, "ls-tree", "-r", "--name-only", head).decode().splitlines()
    checked = 0
    for path in paths:
        try:
            rows = blame_file(handle, head, path)
        except BinaryFile:
            continue
        ours = [(r.line_no, r.introducing_sha, r.author_email) for r in rows]
        assert ours == blame_attributions(dest, head, path), path
        checked += 1
    assert checked >= 3


# -- line utilities ----------------------------------------------------------


def test_split_lines_edge_cases():
    assert split_lines(b"") == []
    assert split_lines(b"a\nb") == [b"a\n", b"b"]
    assert split_lines(b"a\nb\n") == [b"a\n", b"b\n"]
    assert split_lines(b"\n") == [b"\n"]


def test_count_lines_edge_cases():
    assert count_lines(b"") == 0
    assert count_lines(b"a") == 1
    assert count_lines(b"a\n") == 1
    assert count_lines(b"a\nb") == 2
    assert count_lines(b"\n\n") == 2


def test_is_binary_checks_leading_bytes_only():
    assert is_binary(b"\x00abc")
    assert not is_binary(b"plain text\n")
    assert not is_binary(b"x" * 9000 + b"\x00")


def test_diff_blobs_single_replacement():
    assert diff_blobs(b"a\nb\nc\n", b"a\nx\nc\n") == ((2, 1, 2, 1),)


def test_map_lines_back_replacement_attributes_line():
    remaining = [(1, 1), (2, 2), (3, 3)]
    hit, passed = map_lines_back(remaining, [(2, 1, 2, 1)])
    assert hit == [2]
    assert passed == [(1, 1), (3, 3)]


def test_map_lines_back_insert_shifts_later_lines():
    remaining = [(1, 1), (2, 2), (3, 3)]
    hit, passed = map_lines_back(remaining, [(0, 0, 1, 2)])
    assert hit == [1, 2]
    assert passed == [(3, 1)]


def test_map_lines_back_delete_widens_positions():
    remaining = [(1, 1), (2, 2)]
    hit, passed = map_lines_back(remaining, [(2, 2, 1, 0)])
    assert hit == []
    assert passed == [(1, 1), (2, 4)]


def test_map_lines_back_no_hunks_passes_everything():
    remaining = [(5, 1), (9, 2)]
    hit, passed = map_lines_back(remaining, [])
    assert hit == []
    assert passed == remaining
