"""Random general-position instances for experiments and property tests."""

from __future__ import annotations

import random
from fractions import Fraction

from .classify import check_contact
from .geom import GeometryError
from .model import Instance, VSeg, tube_from_segments


def random_instance(
    rng: random.Random,
    n: int,
    *,
    width: int = 40,
    height: int = 24,
    max_len: int = 4,
    denom: int = 2,
    min_len: int = 1,
) -> Instance:
    """One instance with distinct segment x's. Boundaries may still touch."""
    xs = rng.sample(range(width), 2 * n)
    tubes = []
    for i in range(n):
        a, b = sorted(xs[2 * i : 2 * i + 2])
        segs = []
        for x in (a, b):
            lo = rng.randint(0, height - 1)
            h = rng.randint(min_len, max_len)
            segs.append(VSeg(Fraction(x), Fraction(lo, denom), Fraction(lo + h, denom)))
        tubes.append(tube_from_segments(*segs))
    return Instance(tuple(tubes))


def in_general_position(inst: Instance) -> bool:
    tubes = inst.tubes
    for i in range(len(tubes)):
        for j in range(i + 1, len(tubes)):
            try:
                check_contact(tubes[i], tubes[j])
            except GeometryError:
                return False
    return True


def random_general_instance(rng: random.Random, n: int, tries: int = 1000, **kw) -> Instance:
    """Rejection-sample until no two tube boundaries touch at a vertex."""
    for _ in range(tries):
        inst = random_instance(rng, n, **kw)
        if in_general_position(inst):
            return inst
    raise RuntimeError("could not sample a general-position instance")


def corpus(seed: int, count: int, n_max: int, n_min: int = 1, **kw) -> list[Instance]:
    rng = random.Random(seed)
    return [random_general_instance(rng, rng.randint(n_min, n_max), **kw) for _ in range(count)]


def no_double_corpus(seed: int, count: int, n_max: int, n_min: int = 2, **kw) -> list[Instance]:
    """Random instances without any double intersection."""
    from .classify import Kind, classify_instance

    rng = random.Random(seed)
    out: list[Instance] = []
    while len(out) < count:
        inst = random_general_instance(rng, rng.randint(n_min, n_max), **kw)
        if not classify_instance(inst).of_kind(Kind.DOUBLE):
            out.append(inst)
    return out

