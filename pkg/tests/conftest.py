import io
import math
from functools import lru_cache

import numpy as np
import pytest

from horopack.cli import main
from horopack.decor import (C1_SATURATING, TARGET_AREA, DecorationParams, paper_decoration,
                            recursion_sequence)
from horopack.surface import family

SQRT3 = math.sqrt(3.0)


@lru_cache(maxsize=None)
def family_surface(m):
    return family(m)


def saturating_params(m, c1=C1_SATURATING):
    return DecorationParams.of(recursion_sequence(TARGET_AREA, c1, m)[:m])


@lru_cache(maxsize=None)
def paper_surface(m):
    T = family_surface(m)
    params = saturating_params(m)
    return T, paper_decoration(T, params), params


def run_cli(args, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(args), stdin=io.StringIO(stdin_text), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    acc = __import__("sys").modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.line(n))
