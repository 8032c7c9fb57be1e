"""Dense integer ids for commits, files, and users, plus author aliasing."""

import json
from pathlib import Path

from sociogit.errors import ConfigError, EmptyEntity, IoError


class IdRegistry:
    """Assigns 0-based ids to distinct non-empty strings in first-seen order."""

    __slots__ = ("kind", "_forward", "_reverse")

    def __init__(self, kind: str):
        self.kind = kind
        self._forward = {}
        self._reverse = []

    def add(self, entity: str) -> int:
        if not entity:
            raise EmptyEntity(f"empty {self.kind} cannot be registered")
        ident = self._forward.get(entity)
        if ident is None:
            ident = len(self._reverse)
            self._forward[entity] = ident
            self._reverse.append(entity)
        return ident

    def id_of(self, entity: str) -> int:
        try:
            return self._forward[entity]
        except KeyError:
            raise KeyError(f"unregistered {self.kind}: {entity!r}") from None

    def entity_of(self, ident: int) -> str:
        return self._reverse[ident]

    def __len__(self):
        return len(self._reverse)

    def __contains__(self, entity):
        return entity in self._forward

    def items(self):
        """(id, entity) pairs in id order."""
        return list(enumerate(self._reverse))


class AliasTable:
    """Maps author identities onto canonical ones, chains resolved up front."""

    def __init__(self, mapping=None):
        raw = {k.lower(): v.lower() for k, v in (mapping or {}).items()}
        self._resolved = {}
        for key in raw:
            seen = [key]
            cur = key
            while cur in raw:
                cur = raw[cur]
                if cur in seen:
                    raise ConfigError(f"alias cycle through {cur!r}")
                seen.append(cur)
            self._resolved[key] = cur

    def canonical(self, identity: str) -> str:
        identity = identity.lower()
        return self._resolved.get(identity, identity)


def load_alias_table(path) -> AliasTable:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"alias file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise ConfigError(f"alias file {path} must map strings to strings")
    return AliasTable(data)


def user_key(name: str, email: str, aliases: 'AliasTable | None' = None) -> str:
    """Canonical identity for an author: lowercased email, name as fallback."""
    key = (email or name).lower()
    if aliases is not None:
        key = aliases.canonical(key)
    return key


def dump_json(path, obj) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(obj, f, separators=(",", ":"), ensure_ascii=False)
        f.write("\n")


def registry_to_map(registry: IdRegistry) -> dict:
    return {str(ident): entity for ident, entity in registry.items()}


def save_mappings(out_dir, commits: IdRegistry, files: IdRegistry, users: IdRegistry):
    out = Path(out_dir)
    dump_json(out / "idToCommit.json", registry_to_map(commits))
    dump_json(out / "idToFile.json", registry_to_map(files))
    dump_json(out / "idToUser.json", registry_to_map(users))


def load_id_map(path) -> dict:
    """Read an id map file back as {int id: entity}."""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    return {int(k): v for k, v in data.items()}
