"""Seeded random manifold models and curve tables for randomized checks.

Models come from a few small base lattices, disguised by a random unimodular
change of basis.  ``random_table(admissible=True)`` only picks table classes
that meet the hypotheses of the Gr_0 closed form (nonnegative pairings
between distinct classes, nonnegative generic squares, exceptional spheres
counted once with kappa.E = -1).
"""
from __future__ import annotations

import itertools
import random

from .builders import CurveTable, ExceptionalEntry, GenericEntry
from .homology import ClassKind, ManifoldModel, classify, d_A, dot, is_primitive, kappa_dot
from .lattices import TorusData

# (form, kappa) pairs; kappa is characteristic (kappa_i = form_ii mod 2)
BASE_MODELS = {
    2: [
        (((0, 1), (1, -1)), (0, -1)),
        (((0, 1), (1, 0)), (0, -2)),
        (((0, 1), (1, 2)), (0, 0)),
    ],
    3: [
        (((0, 1, 0), (1, 0, 0), (0, 0, -1)), (0, -2, -1)),
        (((0, 1, 0), (1, 0, 0), (0, 0, -1)), (0, 0, -1)),
        (((0, 1, 0), (1, -1, 0), (0, 0, 2)), (0, -1, 0)),
    ],
}


def _unimodular(rng: random.Random, r: int, steps: int = 3):
    """A random integer matrix P with det +-1, together with its inverse."""
    P = [[int(i == j) for j in range(r)] for i in range(r)]
    Pinv = [row[:] for row in P]
    for _ in range(steps):
        i, j = rng.sample(range(r), 2)
        c = rng.choice([-1, 1])
        # P <- P (I + c E_ij): column j += c * column i
        for row in P:
            row[j] += c * row[i]
        # Pinv <- (I - c E_ij) Pinv: row i -= c * row j
        Pinv[i] = [a - c * b for a, b in zip(Pinv[i], Pinv[j])]
    return P, Pinv


def _matvec(M, v):
    return tuple(sum(M[i][k] * v[k] for k in range(len(v))) for i in range(len(M)))


def _transpose(M):
    return [list(col) for col in zip(*M)]


def random_model(rng: random.Random, rank: int):
    """A disguised base model plus the map from base to new coordinates."""
    form, kappa = rng.choice(BASE_MODELS[rank])
    grading = tuple(rng.randint(1, 2) for _ in range(rank))
    P, Pinv = _unimodular(rng, rank)
    Pt = _transpose(P)
    new_form = [[sum(Pt[i][a] * form[a][b] * P[b][j] for a in range(rank) for b in range(rank))
                 for j in range(rank)] for i in range(rank)]
    model = ManifoldModel.from_lists(new_form, _matvec(Pt, kappa), _matvec(Pt, grading))
    return model, (lambda x: _matvec(Pinv, x)), grading


def random_table(rng: random.Random, rank: int, admissible: bool = True,
                 max_grade: int = 3, max_generic: int = 2, max_tori: int = 3) -> CurveTable:
    model, to_new, base_grading = random_model(rng, rank)
    box = range(-2, 4)
    pool = []
    for x in itertools.product(box, repeat=rank):
        g = sum(a * b for a, b in zip(x, base_grading))
        if 1 <= g <= max_grade:
            pool.append(to_new(x))
    rng.shuffle(pool)

    chosen = []

    def compatible(A):
        return not admissible or all(dot(model, A, B) >= 0 for B in chosen)

    generic, exceptional, tori_dirs = [], [], []
    for A in pool:
        kind = classify(model, A)
        if kind is ClassKind.GENERIC:
            if len(generic) >= max_generic or d_A(model, A) < 0 or d_A(model, A) > 3:
                continue
            if admissible and dot(model, A, A) < 0:
                continue
            if compatible(A):
                generic.append(A)
                chosen.append(A)
        elif kind is ClassKind.EXCEPTIONAL:
            if len(exceptional) >= 1 or (admissible and kappa_dot(model, A) != -1):
                continue
            if compatible(A):
                exceptional.append(A)
                chosen.append(A)
        elif kind is ClassKind.TOROIDAL and is_primitive(A):
            if len(tori_dirs) >= 2:
                continue
            if compatible(A):
                tori_dirs.append(A)
                chosen.append(A)

    table = CurveTable(model)
    for A in generic:
        top = d_A(model, A)
        counts = {d: rng.randint(-3, 3) for d in range(top + 1)}
        if not counts[top]:
            counts[top] = rng.choice([-1, 1, 2])
        table.generic.append(GenericEntry(A, counts))
    for E in exceptional:
        count = 1 if admissible else rng.choice([-2, -1, 1, 2])
        table.exceptional.append(ExceptionalEntry(E, count))
    for _ in range(rng.randint(1, max_tori) if tori_dirs else 0):
        A0 = rng.choice(tori_dirs)
        q = 2 if rng.random() < 0.2 else 1
        table.tori.append(TorusData.of_type(tuple(q * a for a in A0), rng.choice([1, -1]),
                                            rng.randint(0, 3)))
    return table.validate()
