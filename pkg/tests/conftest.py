"""Shared fixtures.

The full 4095-library census is expensive (about a minute), so it runs once
per session with two workers and every test that needs census data reuses the
same result and cache directory.
"""

import time
from types import SimpleNamespace

import pytest

from revsynth.census import run_census


@pytest.fixture(scope="session")
def full_census(tmp_path_factory):
    cache_dir = tmp_path_factory.mktemp("census_cache")
    start = time.perf_counter()
    result = run_census(jobs=2, cache_dir=str(cache_dir))
    seconds = time.perf_counter() - start
    return SimpleNamespace(result=result, cache_dir=cache_dir,
                           seconds=seconds, jobs=2)
