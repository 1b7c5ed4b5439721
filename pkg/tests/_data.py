"""Input files shared by the tests."""

import functools
import pathlib

from nodalzeta.cli import load_input

DATA = pathlib.Path(__file__).parent / "data"


@functools.lru_cache(maxsize=None)
def load(name, prime=None):
    return load_input(DATA / f"{name}.ini", prime=prime)


def surface(name):
    return load(name).problem.f
