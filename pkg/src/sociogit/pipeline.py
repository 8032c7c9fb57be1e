"""End-to-end mining runs.

A run has three phases: a single-threaded registration walk that freezes
commit and user ids, a diff phase that may fan out over worker processes, and
a fold phase that replays the per-pair change records in walk order. Because
folding happens in a fixed order over data keyed by pair index, outputs are
byte-identical for any worker count.
"""

import re
import time
from dataclasses import dataclass, field
from pathlib import Path

from sociogit import calculations, kernels, miners, repo
from sociogit._version import __version__
from sociogit.errors import ConfigError, IoError
from sociogit.mappers import (
    AliasTable,
    IdRegistry,
    dump_json,
    load_alias_table,
    save_mappings,
    user_key,
)

MINER_NAMES = (
    "changed-files",
    "assignment-matrix",
    "file-dependency",
    "work-time",
    "commit-influence",
    "files-ownership",
)
CALCULATION_NAMES = ("coordination-needs", "congruence", "pagerank")

_CALC_REQUIRES = {
    "coordination-needs": {"assignment-matrix", "file-dependency"},
    "congruence": {"assignment-matrix", "file-dependency"},
    "pagerank": {"commit-influence"},
}
_BLAME_MINERS = {"commit-influence", "files-ownership"}

_DEFAULT_MAX_FILES = miners.DEFAULT_MAX_FILES_PER_COMMIT
_DEFAULT_DAMPING = calculations.DEFAULT_DAMPING
_DEFAULT_TOL = calculations.DEFAULT_TOL
_DEFAULT_MAX_ITER = calculations.DEFAULT_MAX_ITER
_DEFAULT_WINDOW = calculations.DEFAULT_PROXY_WINDOW_DAYS


@dataclass
class RunConfig:
    repo_path: str
    output_dir: str
    miners: tuple = MINER_NAMES
    calculations: tuple = ()
    branches: 'list | None' = None  # None selects every local branch
    threads: int = 1
    rename_threshold: int = 50
    max_files_per_commit: int = _DEFAULT_MAX_FILES
    fix_pattern: str = "fix"
    include_merge_parents: bool = False
    damping: float = _DEFAULT_DAMPING
    tol: float = _DEFAULT_TOL
    max_iter: int = _DEFAULT_MAX_ITER
    need_threshold: float = 0.0
    aliases_path: 'str | None' = None
    communication_path: 'str | None' = None
    proxy_window_days: int = _DEFAULT_WINDOW

    def validate(self):
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if not 0 <= self.rename_threshold <= 100:
            raise ConfigError(
                f"rename threshold must be in 0..100, got {self.rename_threshold}"
            )
        if self.max_files_per_commit < 1:
            raise ConfigError("max files per commit must be >= 1")
        if not 0 < self.damping < 1:
            raise ConfigError(f"damping must be in (0,1), got {self.damping}")
        if self.tol <= 0:
            raise ConfigError(f"tolerance must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigError(f"max iterations must be >= 1, got {self.max_iter}")
        if not 0 <= self.need_threshold < 1:
            raise ConfigError(
                f"need threshold must be in [0,1), got {self.need_threshold}"
            )
        if self.proxy_window_days < 0:
            raise ConfigError("proxy window must be >= 0 days")
        unknown = set(self.miners) - set(MINER_NAMES)
        if unknown:
            raise ConfigError(f"unknown miners: {', '.join(sorted(unknown))}")
        unknown = set(self.calculations) - set(CALCULATION_NAMES)
        if unknown:
            raise ConfigError(f"unknown calculations: {', '.join(sorted(unknown))}")
        try:
            re.compile(self.fix_pattern)
        except re.error as exc:
            raise ConfigError(f"bad fix pattern: {exc}") from exc

    def effective_miners(self) -> set:
        wanted = set(self.miners)
        for calc in self.calculations:
            wanted |= _CALC_REQUIRES[calc]
        return wanted


@dataclass
class RunResult:
    output_dir: Path
    outputs: dict = field(default_factory=dict)  # logical name → Path
    meta: dict = field(default_factory=dict)


# worker-process state, set once by the pool initializer
_WORKER = {}


def _init_diff_worker(repo_path, rename_threshold, with_hunks):
    _WORKER["handle"] = repo.open_repository(repo_path)
    _WORKER["threshold"] = rename_threshold
    _WORKER["hunks"] = with_hunks


def _diff_chunk(task):
    start, items = task
    handle = _WORKER["handle"]
    threshold = _WORKER["threshold"]
    with_hunks = _WORKER["hunks"]
    out = []
    for cur_sha, parent_sha in items:
        pair = repo.CommitPair(
            handle.commit(cur_sha),
            handle.commit(parent_sha) if parent_sha else None,
        )
        changes = repo.compute_diff(handle, pair, threshold, with_hunks)
        out.append(
            [(c.kind, c.old_path, c.new_path, c.hunks, c.binary) for c in changes]
        )
    return start, out


def _init_blame_worker(repo_path, head_sha, rename_threshold):
    _WORKER["handle"] = repo.open_repository(repo_path)
    _WORKER["head"] = head_sha
    _WORKER["threshold"] = rename_threshold


def _blame_chunk(paths):
    handle = _WORKER["handle"]
    head = _WORKER["head"]
    threshold = _WORKER["threshold"]
    out = {}
    for path in paths:
        attrs = repo.blame_file(handle, head, path, threshold)
        out[path] = [
            (a.line_no, a.introducing_sha, a.author_name, a.author_email)
            for a in attrs
        ]
    return out


def _compute_all_diffs(config, handle, pairs, with_hunks):
    """Per-pair change tuples, in pair order, fanned out when threads > 1."""
    items = [
        (p.current.sha, p.parent.sha if p.parent else None) for p in pairs
    ]
    if config.threads == 1 or len(items) < 2:
        records = []
        for pair in pairs:
            changes = repo.compute_diff(
                handle, pair, config.rename_threshold, with_hunks
            )
            records.append(
                [(c.kind, c.old_path, c.new_path, c.hunks, c.binary) for c in changes]
            )
        return records
    import multiprocessing

    chunk_size = max(1, min(256, -(-len(items) // (config.threads * 8))))
    tasks = [
        (start, items[start:start + chunk_size])
        for start in range(0, len(items), chunk_size)
    ]
    records = [None] * len(items)
    with multiprocessing.Pool(
        processes=config.threads,
        initializer=_init_diff_worker,
        initargs=(str(config.repo_path), config.rename_threshold, with_hunks),
    ) as pool:
        for start, chunk in pool.imap_unordered(_diff_chunk, tasks):
            records[start:start + len(chunk)] = chunk
    return records


def _blame_head_files(config, handle, head_sha, paths):
    """path → list[LineAttribution] for text files at head."""
    results = {}
    if not paths:
        return results
    if config.threads == 1 or len(paths) < 2:
        for path in paths:
            results[path] = repo.blame_file(
                handle, head_sha, path, config.rename_threshold
            )
        return results
    import multiprocessing

    chunk_size = max(1, min(64, -(-len(paths) // (config.threads * 8))))
    tasks = [
        paths[start:start + chunk_size]
        for start in range(0, len(paths), chunk_size)
    ]
    with multiprocessing.Pool(
        processes=config.threads,
        initializer=_init_blame_worker,
        initargs=(str(config.repo_path), head_sha, config.rename_threshold),
    ) as pool:
        for chunk_result in pool.imap_unordered(_blame_chunk, tasks):
            for path, rows in chunk_result.items():
                results[path] = [repo.LineAttribution(*row) for row in rows]
    return results


def _sorted_ids(mapping):
    return sorted(mapping, key=int) if mapping else []


def run(config: RunConfig) -> RunResult:
    """Execute a full mining run and write its outputs. Read-only on the repo."""
    started = time.perf_counter()
    config.validate()
    out_dir = Path(config.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create output dir {out_dir}: {exc}") from exc
    aliases = (
        load_alias_table(config.aliases_path) if config.aliases_path else AliasTable()
    )
    handle = repo.open_repository(config.repo_path)
    tips = repo.resolve_branches(handle, config.branches)
    pairs = list(
        repo.walk_commit_pairs(handle, tips, config.include_merge_parents)
    )

    commits = IdRegistry("COMMIT")
    users = IdRegistry("USER")
    files = IdRegistry("FILE")
    for pair in pairs:
        commits.add(pair.current.sha)
        users.add(
            user_key(pair.current.author_name, pair.current.author_email, aliases)
        )

    wanted = config.effective_miners()
    with_hunks = bool(wanted & _BLAME_MINERS)
    raw_records = _compute_all_diffs(config, handle, pairs, with_hunks)
    changes = []
    for record in raw_records:
        row = []
        for kind, old_path, new_path, hunks, binary in record:
            if old_path is not None:
                files.add(old_path)
            if new_path is not None:
                files.add(new_path)
            row.append(repo.FileChange(kind, old_path, new_path, tuple(hunks), binary))
        changes.append(row)

    data = miners.MiningData(pairs, changes, commits, files, users, aliases)
    result = RunResult(output_dir=out_dir)
    save_mappings(out_dir, commits, files, users)
    result.outputs["idToCommit"] = out_dir / "idToCommit.json"
    result.outputs["idToFile"] = out_dir / "idToFile.json"
    result.outputs["idToUser"] = out_dir / "idToUser.json"

    assignment = dependency = influence = None
    skipped_commits = None

    if "changed-files" in wanted:
        mined = miners.mine_changed_files(data)
        doc = {str(u): sorted(mined[u]) for u in sorted(mined)}
        path = out_dir / "ChangedFiles.json"
        dump_json(path, doc)
        result.outputs["ChangedFiles"] = path
    if "assignment-matrix" in wanted:
        assignment = miners.mine_assignment_matrix(data)
        doc = {
            str(u): {str(f): assignment[u][f] for f in sorted(assignment[u])}
            for u in sorted(assignment)
        }
        path = out_dir / "AssignmentMatrix.json"
        dump_json(path, doc)
        result.outputs["AssignmentMatrix"] = path
    if "file-dependency" in wanted:
        dep = miners.mine_file_dependency_matrix(data, config.max_files_per_commit)
        dependency = dep.matrix
        skipped_commits = dep.skipped_commits
        doc = {}
        for fi in sorted(dependency):
            row = {
                str(fj): dependency[fi][fj]
                for fj in sorted(dependency[fi])
                if fi < fj
            }
            if row:
                doc[str(fi)] = row
        path = out_dir / "FileDependencyMatrix.json"
        dump_json(path, doc)
        result.outputs["FileDependencyMatrix"] = path
    if "work-time" in wanted:
        mined = miners.mine_work_time(data)
        doc = {str(u): mined[u] for u in sorted(mined)}
        path = out_dir / "WorkTime.json"
        dump_json(path, doc)
        result.outputs["WorkTime"] = path
    if "commit-influence" in wanted:
        influence = miners.mine_commit_influence_graph(
            data, miners.compile_fix_pattern(config.fix_pattern)
        )
        doc = {str(c): influence[c] for c in sorted(influence)}
        path = out_dir / "CommitInfluenceGraph.json"
        dump_json(path, doc)
        result.outputs["CommitInfluenceGraph"] = path
    if "files-ownership" in wanted:
        ownership = _run_ownership(config, handle, data, tips)
        doc = {
            "doa": {
                str(u): {str(f): ownership.doa[u][f] for f in sorted(ownership.doa[u])}
                for u in sorted(ownership.doa)
            },
            "lines": {
                str(f): {str(u): ownership.lines[f][u] for u in sorted(ownership.lines[f])}
                for f in sorted(ownership.lines)
            },
        }
        path = out_dir / "FilesOwnership.json"
        dump_json(path, doc)
        result.outputs["FilesOwnership"] = path

    needs = None
    if "coordination-needs" in config.calculations or "congruence" in config.calculations:
        needs = calculations.compute_coordination_needs(
            assignment or {}, dependency or {}, n_users=len(users), n_files=len(files)
        )
    if "coordination-needs" in config.calculations:
        doc = {
            str(u): {str(v): needs[u][v] for v in sorted(needs[u])}
            for u in sorted(needs)
        }
        path = out_dir / "CoordinationNeeds.json"
        dump_json(path, doc)
        result.outputs["CoordinationNeeds"] = path
    if "congruence" in config.calculations:
        if config.communication_path:
            edges = calculations.load_communication_graph(config.communication_path)
            mode = "external"
        else:
            edges = calculations.derive_proxy_communication(
                data, config.proxy_window_days
            )
            mode = "proxy"
        score = calculations.compute_mirroring_congruence(
            needs, edges, config.need_threshold
        )
        path = out_dir / "Congruence.json"
        dump_json(
            path,
            {
                "value": score.value,
                "needPairs": score.need_pairs,
                "matched": score.matched,
                "mode": mode,
            },
        )
        result.outputs["Congruence"] = path
    if "pagerank" in config.calculations:
        if influence:
            ranks = calculations.compute_pagerank(
                influence, config.damping, config.tol, config.max_iter
            )
        else:
            ranks = {}
        doc = {str(c): ranks[c] for c in sorted(ranks)}
        path = out_dir / "PageRank.json"
        dump_json(path, doc)
        result.outputs["PageRank"] = path

    meta = {
        "version": __version__,
        "kernelBackend": kernels.BACKEND,
        "config": {
            "repo": str(config.repo_path),
            "branches": list(config.branches) if config.branches else "ALL",
            "miners": sorted(wanted),
            "calculations": list(config.calculations),
            "threads": config.threads,
            "renameThreshold": config.rename_threshold,
            "maxFilesPerCommit": config.max_files_per_commit,
            "fixPattern": config.fix_pattern,
            "includeMergeParents": config.include_merge_parents,
            "damping": config.damping,
            "tol": config.tol,
            "maxIter": config.max_iter,
            "needThreshold": config.need_threshold,
            "proxyWindowDays": config.proxy_window_days,
            "aliases": bool(config.aliases_path),
            "communication": "external" if config.communication_path else "proxy",
        },
        "branchTips": [[name, sha] for name, sha in tips],
        "commitsVisited": len(commits),
        "pairsMined": len(pairs),
        "usersSeen": len(users),
        "filesSeen": len(files),
        "skippedCommits": skipped_commits,
        "wallTimeSec": round(time.perf_counter() - started, 6),
    }
    meta_path = out_dir / "run_meta.json"
    dump_json(meta_path, meta)
    result.outputs["run_meta"] = meta_path
    result.meta = meta
    return result


def _run_ownership(config, handle, data, tips):
    """Ownership over files at the head of the first resolved branch."""
    if not tips:
        return miners.OwnershipResult()
    head_sha = tips[0][1]
    head_meta = handle.commit(head_sha)
    text_paths = []
    for path_b, _mode, blob_sha in handle.list_files(head_meta.tree_sha):
        if not repo.is_binary(handle.blob(blob_sha)):
            text_paths.append(path_b.decode("utf-8", "replace"))
    blame_results = _blame_head_files(config, handle, head_sha, text_paths)
    return miners.mine_files_ownership(
        data, head_sha, blame_results=blame_results, handle=handle
    )
