"""The scripted-repository generator and its construction-time truth data."""

import pytest

from sociogit.errors import ConfigError, IoError
from sociogit.miners import (
    mine_assignment_matrix,
    mine_changed_files,
    mine_commit_influence_graph,
    mine_file_dependency_matrix,
    mine_files_ownership,
    mine_work_time,
)
from sociogit.synthetic import generate_synthetic_repo

from helpers import git, mining_data


def test_same_seed_reproduces_identical_history(tmp_path):
    first = generate_synthetic_repo(tmp_path / "a", 12, 2, 6, seed=3)
    second = generate_synthetic_repo(tmp_path / "b", 12, 2, 6, seed=3)
    assert first == second
    assert first["headSha"] == second["headSha"]


def test_different_seeds_diverge(tmp_path):
    one = generate_synthetic_repo(tmp_path / "a", 12, 2, 6, seed=1)
    two = generate_synthetic_repo(tmp_path / "b", 12, 2, 6, seed=2)
    assert one["headSha"] != two["headSha"]


def test_commit_count_and_head(synth_repo):
    dest, manifest = synth_repo
    count = int(git(dest, "rev-list", "--count", "main").decode())
    assert count == 40 == len(manifest["commits"]) == len(manifest["markToSha"])
    assert git(dest, "rev-parse", "main").decode().strip() == manifest["headSha"]
    assert manifest["params"] == {"nCommits": 40, "nAuthors": 3, "nFiles": 12,
                                  "seed": 5}


def test_parameter_validation(tmp_path):
    for bad in ((0, 2, 5), (10, 0, 5), (10, 2, 0)):
        with pytest.raises(ConfigError):
            generate_synthetic_repo(tmp_path / "x", *bad)
    occupied = tmp_path / "occupied"
    occupied.mkdir()
    (occupied / "stale.txt").write_text("already here")
    with pytest.raises(IoError):
        generate_synthetic_repo(occupied, 5, 2, 3)


def test_fix_flag_mirrors_message(synth_repo):
    _dest, manifest = synth_repo
    flagged = 0
    for commit in manifest["commits"]:
        assert commit["fix"] == ("fix" in commit["message"].lower())
        flagged += commit["fix"]
    assert 0 < flagged < len(manifest["commits"])


def test_mined_results_match_manifest(synth_repo):
    dest, manifest = synth_repo
    handle, tips, data = mining_data(dest)
    sha_to_mark = {sha: int(mark) for mark, sha in manifest["markToSha"].items()}

    changed = {
        data.users.entity_of(u): sorted(data.files.entity_of(f) for f in fids)
        for u, fids in mine_changed_files(data).items()
    }
    assert changed == manifest["changedFiles"]

    assignment = {
        data.users.entity_of(u): {
            data.files.entity_of(f): count for f, count in row.items()
        }
        for u, row in mine_assignment_matrix(data).items()
    }
    assert assignment == manifest["assignment"]

    dep = mine_file_dependency_matrix(data)
    assert dep.skipped_commits == 0
    pairs = {}
    for fi, row in dep.matrix.items():
        for fj, count in row.items():
            if fi < fj:
                pa, pb = sorted((data.files.entity_of(fi), data.files.entity_of(fj)))
                pairs[f"{pa}|{pb}"] = count
    assert pairs == manifest["dependency"]

    work = {
        data.users.entity_of(u): grid for u, grid in mine_work_time(data).items()
    }
    assert work == manifest["workTime"]

    influence = {}
    for cid, leads in mine_commit_influence_graph(data).items():
        mark = sha_to_mark[data.commits.entity_of(cid)]
        influence[str(mark)] = sorted(
            sha_to_mark[data.commits.entity_of(lead)] for lead in leads
        )
    assert influence == manifest["influence"]

    ownership = mine_files_ownership(data, tips[0][1], handle=handle)
    lines = {
        data.files.entity_of(f): {
            data.users.entity_of(u): count for u, count in row.items()
        }
        for f, row in ownership.lines.items()
    }
    assert lines == manifest["ownership"]["lines"]


def test_ownership_events_match_manifest_change_counts(synth_repo):
    dest, manifest = synth_repo
    handle, tips, data = mining_data(dest)
    ownership = mine_files_ownership(data, tips[0][1], handle=handle)
    by_path = {}
    for u, row in ownership.doa.items():
        for f, score in row.items():
            by_path.setdefault(data.files.entity_of(f), {})[data.users.entity_of(u)] = score
    for path, info in manifest["ownership"]["files"].items():
        scores = by_path[path]
        assert set(scores) == set(info["changes"])
        # exactly the top raw score normalizes to 1.0
        assert max(scores.values()) == 1.0
        assert all(0.0 < v <= 1.0 for v in scores.values())
    assert set(by_path) == set(manifest["ownership"]["files"])
