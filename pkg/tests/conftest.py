import pytest

from sociogit.synthetic import generate_synthetic_repo

from helpers import RepoBuilder


@pytest.fixture(scope="session")
def synth_repo(tmp_path_factory):
    """40 scripted commits with a construction-time truth manifest."""
    dest = tmp_path_factory.mktemp("synth") / "repo"
    manifest = generate_synthetic_repo(dest, 40, 3, 12, seed=5)
    return dest, manifest


@pytest.fixture
def build_repo(tmp_path):
    count = 0

    def make(name=None):
        nonlocal count
        count += 1
        return RepoBuilder(tmp_path / (name or f"repo{count}"))

    return make
