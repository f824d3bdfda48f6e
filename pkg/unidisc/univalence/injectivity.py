"""Sampled injectivity testing

Sampling can falsify univalence on a region but never certify it. Points come
from a scrambled Halton sequence and a seeded generator, half each. Candidate
pairs are the sampled pairs plus near neighbours in the image plane; the best
candidates are refined by Newton continuation of f(z) = f(z1) started at z2.
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from config.settings import settings
from unidisc.analytic.expressions import MapExpr, eval_jet
from unidisc.geometry.disc import hyperbolic_distance
from unidisc.geometry.regions import Region
from unidisc.univalence.reports import CollisionReport

logger = logging.getLogger(__name__)

_NEIGHBOURS = 8


def _sample_pairs(region: Region, n_pairs: int, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    halton = region.sample(2 * (n_pairs - n_pairs // 2), seed, method="halton")
    uniform = region.sample(2 * (n_pairs // 2), seed, method="uniform")
    halves = []
    for points in (halton, uniform):
        usable = len(points) - len(points) % 2
        halves.append(points[:usable].reshape(-1, 2))
    pairs = np.concatenate(halves)
    return pairs[:, 0], pairs[:, 1]


def _candidate_pairs(z: np.ndarray, images: np.ndarray, first: np.ndarray, second: np.ndarray, limit: int):
    """Indices of the most promising pairs, sampled or image-plane neighbours"""
    tree = cKDTree(np.column_stack([images.real, images.imag]))
    k = min(_NEIGHBOURS + 1, len(z))
    _, neighbours = tree.query(np.column_stack([images.real, images.imag]), k=k)
    near_i = np.repeat(np.arange(len(z)), k - 1)
    near_j = neighbours[:, 1:].ravel()
    i = np.concatenate([first, near_i])
    j = np.concatenate([second, near_j])
    separated = hyperbolic_distance(z[i], z[j]) > settings.SEPARATION_FLOOR
    i, j = i[separated], j[separated]
    gaps = np.abs(images[i] - images[j])
    order = np.argsort(gaps, kind="stable")[:limit]
    return i[order], j[order], gaps[order]


def _newton_partner(expr: MapExpr, region: Region, target: np.ndarray, start: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Solve f(z) = target from start; returns final points and image gaps (inf when the path left the region)"""
    z = start.copy()
    alive = np.ones(z.shape, dtype=bool)
    gaps = np.full(z.shape, np.inf)
    for _ in range(settings.NEWTON_MAX_ITER):
        if not np.any(alive):
            break
        jet = eval_jet(expr, z[alive])
        residual = jet.f - target[alive]
        gaps[alive] = np.abs(residual)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = residual / jet.df
        candidate = z[alive] - step
        ok = np.isfinite(candidate) & region.contains(candidate) & (np.abs(candidate) < 1)
        index = np.flatnonzero(alive)
        z[index[ok]] = candidate[ok]
        alive[index[~ok]] = False
        gaps[index[~ok]] = np.inf
        done = np.abs(step[ok]) < 1e-15 * (1 + np.abs(candidate[ok]))
        alive[index[ok][done]] = False
    final = np.isfinite(gaps)
    if np.any(final):
        gaps[final] = np.abs(eval_jet(expr, z[final]).f - target[final])
    return z, gaps


def injectivity_sample(expr: MapExpr, region: Region, n_pairs: int = 10000, seed: Optional[int] = None,
                       collision_tol: Optional[float] = None) -> CollisionReport:
    """
    Search the region for two separated points with the same image

    Args:
        expr: Map descriptor
        region: Region inside the disc
        n_pairs: Number of sampled pairs
        seed: Sampling seed (settings.DEFAULT_SEED by default)
        collision_tol: Largest accepted image gap after refinement

    Returns:
        CollisionReport; ``found`` is False when no pair passed the refinement
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    collision_tol = settings.COLLISION_TOL if collision_tol is None else collision_tol
    first, second = _sample_pairs(region, n_pairs, seed)
    pairs_tested = int(len(first))
    if pairs_tested == 0:
        logger.warning(f"No sample pairs landed in region {region.to_dict()}")
        return CollisionReport(False, None, None, None, 0, seed)

    z = np.concatenate([first, second])
    images = eval_jet(expr, z).f
    i, j, raw_gaps = _candidate_pairs(z, images, np.arange(pairs_tested), np.arange(pairs_tested) + pairs_tested,
                                      settings.REFINE_CANDIDATES)
    if len(i) == 0:
        return CollisionReport(False, None, None, None, pairs_tested, seed)
    logger.debug(f"Refining {len(i)} candidate pairs, smallest raw gap {raw_gaps[0]:.3g}")

    partners, gaps = _newton_partner(expr, region, images[i], z[j])
    anchors = z[i]
    separated = np.zeros(len(i), dtype=bool)
    finite = np.isfinite(gaps)
    if np.any(finite):
        separated[finite] = hyperbolic_distance(anchors[finite], partners[finite]) > settings.SEPARATION_FLOOR
    accepted = np.flatnonzero(separated & (gaps <= collision_tol))
    if len(accepted) == 0:
        return CollisionReport(False, None, None, None, pairs_tested, seed)

    best = accepted[0]
    logger.info(f"Collision found between {anchors[best]:.6g} and {partners[best]:.6g}")
    return CollisionReport(True, complex(anchors[best]), complex(partners[best]), float(gaps[best]), pairs_tested, seed)
