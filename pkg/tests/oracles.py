"""Independent reference implementations used to check the solvers.

Only the scalar potential functions are shared with the library; hard
labels, the interaction mapping, consistency counts and enumeration are
re-derived here from their definitions.
"""

import itertools
import math

from crfintent.potentials import DEFAULT_CLAMP, pe_potential, pp_potential, unary_potential

_STATE = {(0, 0): 1, (1, 1): 2, (0, 1): 0, (1, 0): 0}


def naive_hard(scene, graph):
    node = [1 if p.unary_prob > 0.5 else 0 for p in scene.pedestrians]
    pe = [1 if scene.pe_probs[pid] > 0.5 else 0 for pid in graph.ped_nodes]
    pp = []
    for key in graph.pp_edges:
        probs = scene.pp_probs[key]
        best = 0
        for k in (1, 2):
            if probs[k] > probs[best]:
                best = k
        pp.append(best)
    return node, pp, pe


def naive_energy(scene, graph, y, w, clamp=DEFAULT_CLAMP, consistency=True, hard=None):
    idx = {pid: k for k, pid in enumerate(graph.ped_nodes)}
    _, pp_hard, pe_hard = hard or naive_hard(scene, graph)
    e = 0.0
    for k, ped in enumerate(scene.pedestrians):
        e += w.alpha * unary_potential(y[k], ped.unary_prob, clamp)
        e += w.gamma * pe_potential(y[k], scene.pe_probs[ped.id], clamp)
        if consistency and y[k] != pe_hard[k]:
            e += w.lambda2
    for m, (a, b) in enumerate(graph.pp_edges):
        ya, yb = y[idx[a]], y[idx[b]]
        e += w.beta * pp_potential(ya, yb, scene.pp_probs[(a, b)], clamp)
        if consistency and _STATE[(ya, yb)] != pp_hard[m]:
            e += w.lambda1
    return e


def naive_map(scene, graph, w, clamp=DEFAULT_CLAMP, tol=1e-12):
    """Minimum inference energy and every configuration attaining it."""
    hard = naive_hard(scene, graph)
    scored = [
        (naive_energy(scene, graph, y, w, clamp, hard=hard), y)
        for y in itertools.product((0, 1), repeat=graph.n)
    ]
    e_min = min(e for e, _ in scored)
    slack = tol * max(1.0, abs(e_min))
    minimizers = sorted(y for e, y in scored if e <= e_min + slack)
    return e_min, minimizers


def naive_distribution(scene, graph, w, clamp=DEFAULT_CLAMP):
    configs = list(itertools.product((0, 1), repeat=graph.n))
    energies = [naive_energy(scene, graph, y, w, clamp, consistency=False) for y in configs]
    shift = min(energies)
    weights = [math.exp(-(e - shift)) for e in energies]
    z = math.fsum(weights)
    return {y: wt / z for y, wt in zip(configs, weights)}
