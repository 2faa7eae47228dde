"""
Artifact writers: error tables, reports, persisted solutions, field samples and
per-iteration adaptation state (hyperplane density, collocation points, gammas).

CSV files are UTF-8 with LF line endings and scientific notation.
"""

import json
import logging
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from rfm import constants
from rfm.adaptivity import SolutionHistory
from rfm.exceptions import GeometryError
from rfm.features import ActivationKind, FeatureSet, SubdomainFeatures, hyperplane_density
from rfm.geometry import Partition, PouKind, from_local, partition_from_dict, tensor_grid, to_local
from rfm.solver import Solution, evaluate

logger = logging.getLogger(__name__)

ERROR_COLUMNS = ["iteration", "linf", "l2"]


def _write_frame(frame: pd.DataFrame, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    frame.to_csv(path, index=False, float_format=constants.FLOAT_FORMAT,
                 lineterminator="\n", encoding="utf-8")
    return path


def write_json(data: Dict[str, Any], path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_errors_csv(rows: Iterable[Tuple[int, float, float]], path: str) -> str:
    """errors.csv with header ``iteration,linf,l2``."""
    frame = pd.DataFrame(list(rows), columns=ERROR_COLUMNS)
    frame["iteration"] = frame["iteration"].astype(int)
    return _write_frame(frame, path)


# ---------------------------------------------------------------------------
# Solution persistence
# ---------------------------------------------------------------------------

def save_solution(sol: Solution, path: str) -> str:
    """Partition, features, coefficients and PoU kind in one ``.npz`` archive."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    arrays: Dict[str, np.ndarray] = {
        "partition": np.array(json.dumps(sol.partition.to_dict(), sort_keys=True)),
        "coefficients": np.asarray(sol.coefficients),
        "output_dim": np.array(sol.output_dim),
        "pou": np.array(sol.pou.value),
        "activation": np.array(sol.features.activation.value),
    }
    for n, block in enumerate(sol.features):
        for key, values in block.to_arrays().items():
            arrays[f"{key}_{n}"] = np.asarray(values)
    np.savez(path, **arrays)
    return path


def load_solution(path: str) -> Solution:
    with np.load(path, allow_pickle=False) as data:
        partition = partition_from_dict(json.loads(str(data["partition"])))
        blocks = tuple(
            SubdomainFeatures(n, data[f"normals_{n}"], data[f"offsets_{n}"], data[f"gammas_{n}"],
                              data[f"anchors_{n}"])
            for n in range(len(partition))
        )
        features = FeatureSet(blocks, ActivationKind(str(data["activation"])))
        return Solution(partition, features, np.array(data["coefficients"]), int(data["output_dim"]),
                        PouKind(str(data["pou"])))


# ---------------------------------------------------------------------------
# Field samples
# ---------------------------------------------------------------------------

def export_field(sol: Solution, window: Sequence[float], resolution: int, path: str,
                 with_gradient: bool = True) -> str:
    """
    CSV of ``x, y, value[, grad_norm]`` on a ``resolution x resolution`` grid.

    Args:
        window: (x0, y0, x1, y1) inside the solution's domain

    Raises:
        GeometryError: for a degenerate window or one leaving the domain
    """
    x0, y0, x1, y1 = (float(v) for v in window)
    domain = sol.partition.domain
    if not (x0 < x1 and y0 < y1):
        raise GeometryError("Export window must have positive extent", {"window": [x0, y0, x1, y1]})
    if not domain.contains(np.array([[x0, y0], [x1, y1]])).all():
        raise GeometryError("Export window must lie inside the domain",
                            {"window": [x0, y0, x1, y1], "domain": domain.to_dict()})
    if int(resolution) < 2:
        raise GeometryError("Export resolution must be at least 2", {"resolution": resolution})
    grid = tensor_grid((x0, y0), (x1, y1), int(resolution), int(resolution))
    fields = evaluate(sol, grid, max_order=1 if with_gradient else 0)
    frame = pd.DataFrame({"x": grid[:, 0], "y": grid[:, 1], "value": fields.value[:, 0]})
    if with_gradient:
        frame["grad_norm"] = fields.gradient_norm
    logger.info("Exported %d field samples to %s", len(frame), path)
    return _write_frame(frame, path)


# ---------------------------------------------------------------------------
# Adaptation state
# ---------------------------------------------------------------------------

def density_frame(partition: Partition, features: FeatureSet, tau: float, resolution: int) -> pd.DataFrame:
    """Hyperplane density of the owning subdomain's features over a grid of the domain."""
    domain = partition.domain
    grid = tensor_grid(domain.lower, domain.upper, int(resolution), int(resolution))
    density = np.zeros(len(grid))
    owners = partition.locate(grid)
    for n, sub in enumerate(partition):
        idx = np.flatnonzero(owners == n)
        if len(idx):
            density[idx] = hyperplane_density(features[n], to_local(sub, grid[idx]), tau)
    return pd.DataFrame({"x": grid[:, 0], "y": grid[:, 1], "density": density})


def points_frame(record_collocation) -> pd.DataFrame:
    frames: List[pd.DataFrame] = []
    for points, role, owners in record_collocation.tagged_points():
        frames.append(pd.DataFrame({"x": points[:, 0], "y": points[:, 1], "role": role, "subdomain": owners}))
    return pd.concat(frames, ignore_index=True)


def gammas_frame(partition: Partition, features: FeatureSet) -> pd.DataFrame:
    """Anchor of every feature in global coordinates with its shape parameter."""
    frames = []
    for n, (sub, block) in enumerate(zip(partition, features)):
        anchors = from_local(sub, block.anchors)
        frames.append(pd.DataFrame({"subdomain": n, "x": anchors[:, 0], "y": anchors[:, 1],
                                    "gamma": block.gammas}))
    return pd.concat(frames, ignore_index=True)


def export_adaptation_state(history: SolutionHistory, path: str,
                            tau: float = constants.DENSITY_BANDWIDTH,
                            resolution: int = constants.DENSITY_RESOLUTION,
                            iterations: Optional[Sequence[int]] = None) -> List[str]:
    """
    Write ``iter_<k>/density.csv``, ``points.csv`` and ``gammas.csv`` for every iteration.

    Returns:
        Paths of the written files.
    """
    written = []
    selected = range(len(history)) if iterations is None else iterations
    for k in selected:
        record = history[k]
        sol = record.solution
        folder = os.path.join(path, f"iter_{k}")
        written.append(_write_frame(density_frame(sol.partition, sol.features, tau, resolution),
                                    os.path.join(folder, "density.csv")))
        written.append(_write_frame(points_frame(record.collocation), os.path.join(folder, "points.csv")))
        written.append(_write_frame(gammas_frame(sol.partition, sol.features), os.path.join(folder, "gammas.csv")))
    logger.info("Exported adaptation state of %d iterations to %s", len(selected), path)
    return written
