"""Read-only access to an on-disk Git object database.

Understands loose objects, packfiles with version-2 indexes (including
OFS_DELTA/REF_DELTA chains), packed-refs, and loose refs. Nothing here ever
writes to the repository.
"""

import mmap
import os
import struct
import zlib
from pathlib import Path

from sociogit import kernels
from sociogit.errors import CorruptObject, IoError, NotARepository

OBJ_COMMIT = 1
OBJ_TREE = 2
OBJ_BLOB = 3
OBJ_TAG = 4
OBJ_OFS_DELTA = 6
OBJ_REF_DELTA = 7

TYPE_NAMES = {OBJ_COMMIT: "commit", OBJ_TREE: "tree", OBJ_BLOB: "blob", OBJ_TAG: "tag"}

_IDX_MAGIC = b"\xfftOc"


def discover_git_dir(path) -> Path:
    """Locate the actual git directory for a bare or non-bare repository."""
    p = Path(path)
    if not p.exists():
        raise NotARepository(f"{p} does not exist")
    dotgit = p / ".git"
    if dotgit.is_dir():
        p = dotgit
    elif dotgit.is_file():
        try:
            text = dotgit.read_text()
        except OSError as exc:
            raise IoError(str(exc)) from exc
        if not text.startswith("gitdir:"):
            raise NotARepository(f"{dotgit} is not a gitdir link")
        p = (p / text.split(":", 1)[1].strip()).resolve()
    if not (p / "objects").is_dir() or not (p / "HEAD").is_file():
        raise NotARepository(f"{path} lacks a Git object database")
    return p


def read_branches(git_dir: Path) -> dict:
    """All local branches as {name: tip sha}, loose refs overriding packed."""
    refs = {}
    packed = git_dir / "packed-refs"
    if packed.is_file():
        try:
            lines = packed.read_bytes().splitlines()
        except OSError as exc:
            raise IoError(str(exc)) from exc
        for line in lines:
            if not line or line.startswith(b"#") or line.startswith(b"^"):
                continue
            parts = line.split(b" ", 1)
            if len(parts) != 2:
                continue
            sha, name = parts
            if name.startswith(b"refs/heads/"):
                refs[name[len(b"refs/heads/"):].decode()] = sha.decode()
    heads = git_dir / "refs" / "heads"
    if heads.is_dir():
        for root, _dirs, files in os.walk(heads):
            for fname in files:
                full = Path(root) / fname
                name = full.relative_to(heads).as_posix()
                try:
                    content = full.read_text().strip()
                except OSError as exc:
                    raise IoError(str(exc)) from exc
                sha = _resolve_symref(git_dir, content, depth=0)
                if sha:
                    refs[name] = sha
    return refs


def _resolve_symref(git_dir, content, depth):
    if depth > 5:
        return None
    if content.startswith("ref:"):
        target = git_dir / content.split(":", 1)[1].strip()
        if not target.is_file():
            return None
        return _resolve_symref(git_dir, target.read_text().strip(), depth + 1)
    return content if len(content) == 40 else None


class PackFile:
    """One .pack/.idx pair, lazily mapped."""

    def __init__(self, pack_path: Path):
        self.pack_path = pack_path
        idx_path = pack_path.with_suffix(".idx")
        try:
            with open(idx_path, "rb") as f:
                self._idx = mmap.mmap(f.fileno(), 0, access=mmap.ACCESS_READ)
            with open(pack_path, "rb") as f:
                self._pack = mmap.mmap(f.fileno(), 0, access=mmap.ACCESS_READ)
        except OSError as exc:
            raise IoError(str(exc)) from exc
        if self._idx[:4] != _IDX_MAGIC or struct.unpack_from(">I", self._idx, 4)[0] != 2:
            raise CorruptObject(f"{idx_path} is not a v2 pack index")
        self._fanout = struct.unpack_from(">256I", self._idx, 8)
        self.count = self._fanout[255]
        self._sha_ofs = 8 + 256 * 4
        self._ofs_ofs = self._sha_ofs + self.count * 20 + self.count * 4
        self._ofs64_ofs = self._ofs_ofs + self.count * 4
        if self._pack[:4] != b"PACK":
            raise CorruptObject(f"{pack_path} is not a packfile")
        # cache of resolved (type, payload) keyed by offset, for delta bases
        self._cache = {}

    def find_offset(self, sha_bin: bytes):
        first = sha_bin[0]
        lo = self._fanout[first - 1] if first else 0
        hi = self._fanout[first]
        base = self._sha_ofs
        idx = self._idx
        while lo < hi:
            mid = (lo + hi) // 2
            entry = idx[base + mid * 20: base + mid * 20 + 20]
            if entry < sha_bin:
                lo = mid + 1
            elif entry > sha_bin:
                hi = mid
            else:
                ofs32 = struct.unpack_from(">I", idx, self._ofs_ofs + mid * 4)[0]
                if ofs32 & 0x80000000:
                    return struct.unpack_from(
                        ">Q", idx, self._ofs64_ofs + (ofs32 & 0x7FFFFFFF) * 8
                    )[0]
                return ofs32
        return None

    def read_object(self, offset: int, store) -> tuple:
        """Resolve the object at a pack offset to (type_num, payload bytes)."""
        cached = self._cache.get(offset)
        if cached is not None:
            return cached
        type_num, size, data_ofs, delta_ref = self._header_at(offset)
        if type_num in (OBJ_OFS_DELTA, OBJ_REF_DELTA):
            delta = self._inflate(data_ofs, size)
            if type_num == OBJ_OFS_DELTA:
                base_type, base = self.read_object(offset - delta_ref, store)
            else:
                base_type, base = store.get_raw(delta_ref.hex())
            try:
                payload = kernels.apply_delta(base, delta)
            except ValueError as exc:
                raise CorruptObject(f"bad delta at {self.pack_path}:{offset}: {exc}") from exc
            result = (base_type, payload)
        else:
            result = (type_num, self._inflate(data_ofs, size))
        if len(self._cache) > 512:
            self._cache.clear()
        self._cache[offset] = result
        return result

    def _header_at(self, offset):
        pack = self._pack
        byte = pack[offset]
        type_num = (byte >> 4) & 0x7
        size = byte & 0x0F
        shift = 4
        pos = offset + 1
        while byte & 0x80:
            byte = pack[pos]
            pos += 1
            size |= (byte & 0x7F) << shift
            shift += 7
        if type_num == OBJ_OFS_DELTA:
            byte = pack[pos]
            pos += 1
            neg = byte & 0x7F
            while byte & 0x80:
                byte = pack[pos]
                pos += 1
                neg = ((neg + 1) << 7) | (byte & 0x7F)
            return type_num, size, pos, neg
        if type_num == OBJ_REF_DELTA:
            return type_num, size, pos + 20, pack[pos:pos + 20]
        if type_num not in TYPE_NAMES:
            raise CorruptObject(f"bad object type {type_num} in {self.pack_path}")
        return type_num, size, pos, None

    def _inflate(self, start, expected):
        d = zlib.decompressobj()
        pieces = []
        pos = start
        total = 0
        pack_len = len(self._pack)
        try:
            while not d.eof:
                if pos >= pack_len:
                    raise CorruptObject(f"truncated object in {self.pack_path}")
                chunk = self._pack[pos:pos + 65536]
                pos += len(chunk)
                piece = d.decompress(chunk)
                pieces.append(piece)
                total += len(piece)
        except zlib.error as exc:
            raise CorruptObject(f"zlib failure in {self.pack_path}: {exc}") from exc
        data = b"".join(pieces)
        if len(data) != expected:
            raise CorruptObject(f"object size mismatch in {self.pack_path}")
        return data


class ObjectStore:
    """Lookup of raw objects by hex sha across loose storage and all packs."""

    def __init__(self, git_dir: Path):
        self.git_dir = git_dir
        self._objects = git_dir / "objects"
        self._packs = None

    def _pack_list(self):
        if self._packs is None:
            pack_dir = self._objects / "pack"
            packs = []
            if pack_dir.is_dir():
                for p in sorted(pack_dir.glob("*.pack")):
                    if p.with_suffix(".idx").is_file():
                        packs.append(PackFile(p))
            self._packs = packs
        return self._packs

    def get_raw(self, sha: str) -> tuple:
        """Raw object payload as (type_num, bytes); CorruptObject if absent."""
        loose = self._objects / sha[:2] / sha[2:]
        if loose.is_file():
            try:
                raw = zlib.decompress(loose.read_bytes())
            except (OSError, zlib.error) as exc:
                raise CorruptObject(f"cannot read loose object {sha}: {exc}") from exc
            nul = raw.find(b"\x00")
            if nul < 0:
                raise CorruptObject(f"malformed loose object {sha}")
            type_name, _, size = raw[:nul].partition(b" ")
            payload = raw[nul + 1:]
            for num, name in TYPE_NAMES.items():
                if name.encode() == type_name:
                    if int(size) != len(payload):
                        raise CorruptObject(f"size mismatch in loose object {sha}")
                    return num, payload
            raise CorruptObject(f"unknown type {type_name!r} in loose object {sha}")
        sha_bin = bytes.fromhex(sha)
        packs = self._pack_list()
        for i, pack in enumerate(packs):
            offset = pack.find_offset(sha_bin)
            if offset is not None:
                if i:
                    # keep the most recently hit pack in front
                    packs.insert(0, packs.pop(i))
                return pack.read_object(offset, self)
        raise CorruptObject(f"object {sha} not found")

    def get(self, sha: str, expected: int) -> bytes:
        type_num, payload = self.get_raw(sha)
        if type_num != expected:
            raise CorruptObject(
                f"object {sha} is a {TYPE_NAMES.get(type_num)}, expected {TYPE_NAMES[expected]}"
            )
        return payload

    def contains(self, sha: str) -> bool:
        try:
            self.get_raw(sha)
            return True
        except CorruptObject:
            return False


def parse_commit(sha: str, data: bytes) -> dict:
    """Split a commit object into tree, parents, author fields, and message."""
    try:
        head, _, message = data.partition(b"\n\n")
        tree = None
        parents = []
        author = None
        for line in head.split(b"\n"):
            if line.startswith(b" "):
                continue  # continuation of a multi-line header (gpgsig etc.)
            key, _, value = line.partition(b" ")
            if key == b"tree":
                tree = value.decode()
            elif key == b"parent":
                parents.append(value.decode())
            elif key == b"author":
                author = value
        if tree is None or author is None:
            raise ValueError("missing tree or author header")
        name, email, when, tz = _parse_ident(author)
        return {
            "sha": sha,
            "tree": tree,
            "parents": tuple(parents),
            "author_name": name,
            "author_email": email,
            "author_time": when,
            "tz_offset": tz,
            "message": message.decode("utf-8", "replace"),
        }
    except (ValueError, IndexError) as exc:
        raise CorruptObject(f"cannot parse commit {sha}: {exc}") from exc


def _parse_ident(raw: bytes):
    lt = raw.rfind(b"<")
    gt = raw.rfind(b">")
    if lt < 0 or gt < lt:
        raise ValueError("malformed ident")
    name = raw[:lt].strip().decode("utf-8", "replace")
    email = raw[lt + 1:gt].decode("utf-8", "replace")
    tail = raw[gt + 1:].split()
    when = int(tail[0])
    tz_raw = tail[1].decode()
    sign = -1 if tz_raw[0] == "-" else 1
    minutes = int(tz_raw[1:3]) * 60 + int(tz_raw[3:5])
    return name, email, when, sign * minutes


def parse_tree(data: bytes) -> list:
    """Tree entries as (mode, name bytes, sha hex) in storage order."""
    entries = []
    ofs = 0
    ln = len(data)
    while ofs < ln:
        nul = data.find(b"\x00", ofs)
        if nul < 0 or nul + 21 > ln:
            raise CorruptObject("malformed tree object")
        mode_name = data[ofs:nul]
        sp = mode_name.find(b" ")
        mode = int(mode_name[:sp], 8)
        name = mode_name[sp + 1:]
        entries.append((mode, name, data[nul + 1:nul + 21].hex()))
        ofs = nul + 21
    return entries
