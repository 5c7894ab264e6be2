"""Shared synthetic fixtures: PNG writers, fixation logs and small manifests."""

import json
from pathlib import Path
from typing import Iterable

import numpy as np
import pytest
from PIL import Image

from camobench.builder.logs import write_fixation_log
from camobench.models import FixationEvent, FixationSession


def write_gray(path: Path, values: np.ndarray) -> Path:
    """8-bit grayscale PNG of a uint8-castable array."""
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(values, dtype=np.uint8)).save(path)
    return path


def write_mask(path: Path, bits: np.ndarray) -> Path:
    return write_gray(path, np.asarray(bits, dtype=bool).astype(np.uint8) * 255)


def write_unit_map(path: Path, values: np.ndarray) -> Path:
    return write_gray(path, np.rint(np.clip(values, 0.0, 1.0) * 255))


def write_rgb(path: Path, pixels: np.ndarray) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(pixels, dtype=np.uint8)).save(path)
    return path


def rect_mask(height: int, width: int, rows: slice, cols: slice) -> np.ndarray:
    bits = np.zeros((height, width), dtype=bool)
    bits[rows, cols] = True
    return bits


def session(
    observer: str, image_id: str, t0: int, events: Iterable[tuple[int, int, int]]
) -> FixationSession:
    return FixationSession(
        image_id=image_id,
        observer_id=observer,
        t0_ms=t0,
        events=tuple(FixationEvent(timestamp_ms=t, x=x, y=y) for t, x, y in events),
    )


def save_manifest(path: Path, document: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2))
    return path


@pytest.fixture
def seg_manifest(tmp_path: Path) -> Path:
    """Two 16x16 images; method 'perfect' reproduces the gt, method 'inverse' its complement."""
    entries = []
    for k, image_id in enumerate(("a", "b")):
        gt = rect_mask(16, 16, slice(2 + k, 10 + k), slice(4, 12))
        write_rgb(tmp_path / "images" / f"{image_id}.png", np.full((16, 16, 3), 90))
        write_mask(tmp_path / "gt" / f"{image_id}.png", gt)
        write_mask(tmp_path / "preds" / "perfect" / f"{image_id}.png", gt)
        write_mask(tmp_path / "preds" / "inverse" / f"{image_id}.png", ~gt)
        entries.append(
            {
                "id": image_id,
                "image": f"images/{image_id}.png",
                "width": 16,
                "height": 16,
                "gt_mask": f"gt/{image_id}.png",
            }
        )
    return save_manifest(
        tmp_path / "manifest.json",
        {
            "dataset": "toy",
            "entries": entries,
            "predictions": {"perfect": "preds/perfect", "inverse": "preds/inverse"},
        },
    )


@pytest.fixture
def fix_manifest(tmp_path: Path) -> Path:
    """Three 20x20 images with fixation-point PNGs, density maps and one 'oracle' method."""
    entries = []
    for k, image_id in enumerate(("p", "q", "r")):
        points = np.zeros((20, 20), dtype=bool)
        points[5 + k, 5 + 2 * k] = True
        points[12, 14 - k] = True
        yy, xx = np.mgrid[0:20, 0:20]
        density = np.zeros((20, 20))
        for y, x in zip(*np.nonzero(points)):
            density += np.exp(-((yy - y) ** 2 + (xx - x) ** 2) / 8.0)
        density /= density.max()
        write_rgb(tmp_path / "images" / f"{image_id}.png", np.full((20, 20, 3), 128))
        write_mask(tmp_path / "points" / f"{image_id}.png", points)
        write_unit_map(tmp_path / "density" / f"{image_id}.png", density)
        write_unit_map(tmp_path / "preds" / "oracle" / f"{image_id}.png", density)
        entries.append(
            {
                "id": image_id,
                "image": f"images/{image_id}.png",
                "width": 20,
                "height": 20,
                "fixation_points": f"points/{image_id}.png",
                "fixation_map": f"density/{image_id}.png",
            }
        )
    return save_manifest(
        tmp_path / "manifest.json",
        {"dataset": "toyfix", "entries": entries, "predictions": {"oracle": "preds/oracle"}},
    )


RANKS = ("ES", "M1", "M2", "M3", "HD")


@pytest.fixture
def rank_manifest(tmp_path: Path) -> Path:
    """Five 24x24 images, one ranked instance each (ES..HD).

    Method 'exact' predicts the gt rank, method 'reversed' the mirrored rank.
    """
    mirrored = dict(zip(RANKS, reversed(RANKS)))
    entries = []
    for k, rank in enumerate(RANKS):
        image_id = f"img{k}"
        bits = rect_mask(24, 24, slice(4, 16), slice(3 + k, 15 + k))
        write_rgb(tmp_path / "images" / f"{image_id}.png", np.full((24, 24, 3), 60))
        write_mask(tmp_path / "instances" / f"{image_id}_0.png", bits)
        for method, label in (("exact", rank), ("reversed", mirrored[rank])):
            root = tmp_path / "preds" / method
            write_mask(root / "masks" / f"{image_id}.png", bits)
            (root / f"{image_id}.json").write_text(
                json.dumps(
                    {
                        "image_id": image_id,
                        "instances": [
                            {"mask": f"masks/{image_id}.png", "rank": label, "score": 0.8}
                        ],
                    }
                )
            )
        entries.append(
            {
                "id": image_id,
                "image": f"images/{image_id}.png",
                "width": 24,
                "height": 24,
                "instances": [{"mask": f"instances/{image_id}_0.png", "rank": rank}],
            }
        )
    return save_manifest(
        tmp_path / "manifest.json",
        {
            "dataset": "toyrank",
            "entries": entries,
            "predictions": {"exact": "preds/exact", "reversed": "preds/reversed"},
        },
    )


@pytest.fixture
def build_manifest(tmp_path: Path) -> Path:
    """One 32x32 image with two instances and four observers.

    Instance 0 (left) is fixated by every observer at 200..500 ms; instance 1
    (right) only by one observer, so it is failure-forced.
    """
    left = rect_mask(32, 32, slice(8, 24), slice(2, 12))
    right = rect_mask(32, 32, slice(8, 24), slice(20, 30))
    write_rgb(tmp_path / "images" / "scene.png", np.full((32, 32, 3), 100))
    write_mask(tmp_path / "instances" / "scene_0.png", left)
    write_mask(tmp_path / "instances" / "scene_1.png", right)
    logs = []
    for j in range(4):
        events = [(1000 + 200 + 100 * j, 5, 10), (1000 + 900, 16, 2)]
        if j == 0:
            events.append((1000 + 1500, 25, 15))
        path = tmp_path / "logs" / f"obs{j}_scene.csv"
        write_fixation_log(session(f"obs{j}", "scene", 1000, events), path)
        logs.append(f"logs/obs{j}_scene.csv")
    return save_manifest(
        tmp_path / "manifest.json",
        {
            "dataset": "toybuild",
            "entries": [
                {
                    "id": "scene",
                    "image": "images/scene.png",
                    "width": 32,
                    "height": 32,
                    "instances": [
                        {"mask": "instances/scene_0.png"},
                        {"mask": "instances/scene_1.png"},
                    ],
                    "fixation_logs": logs,
                }
            ],
        },
    )
