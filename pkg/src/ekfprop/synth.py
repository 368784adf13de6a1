"""Synthetic digit-like image data for demos and self-contained tests.

Each class is a fixed template of smooth bumps on a 28x28 grid; samples
vary in brightness and carry pixel noise, then quantize to uint8 so they
round-trip the IDX format exactly. Run as a module to produce a ready
demo data directory:

    python -m ekfprop.synth --out data/
"""

import argparse
from pathlib import Path

import numpy as np

from .data import read_idx, write_idx

SIDE = 28
N_CLASSES = 10


def class_templates(n_classes=N_CLASSES, side=SIDE, seed=0):
    """One smooth bump-pattern template per class, values in [0, 0.85]."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:side, 0:side]
    templates = []
    for _ in range(n_classes):
        img = np.zeros((side, side))
        for _ in range(rng.integers(3, 6)):
            cy, cx = rng.uniform(4, side - 4, size=2)
            width = rng.uniform(2.0, 4.5)
            img += np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * width**2))
        img *= 0.85 / img.max()
        templates.append(img)
    return templates


def make_images(n, seed, noise=0.12, n_classes=N_CLASSES, side=SIDE,
                template_seed=0):
    """Synthesize n labeled uint8 images (balanced classes, shuffled)."""
    templates = class_templates(n_classes, side, template_seed)
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % n_classes
    labels = labels[rng.permutation(n)]
    images = np.empty((n, side, side), dtype=np.uint8)
    for i, label in enumerate(labels):
        brightness = rng.uniform(0.6, 1.0)
        img = brightness * templates[label]
        img = img + rng.normal(0.0, noise, size=img.shape)
        images[i] = np.round(np.clip(img, 0.0, 1.0) * 255.0).astype(np.uint8)
    return images, labels.astype(np.uint8)


def write_split(out_dir, stem, n, seed, noise=0.12):
    """Write one IDX image/label pair; returns the two paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images, labels = make_images(n, seed, noise=noise)
    images_path = out_dir / f"{stem}-images.idx"
    labels_path = out_dir / f"{stem}-labels.idx"
    write_idx(images, labels, images_path, labels_path)
    return images_path, labels_path


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="generate synthetic IDX demo data"
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--train", type=int, default=6000)
    parser.add_argument("--calib", type=int, default=4000)
    parser.add_argument("--test", type=int, default=1000)
    parser.add_argument("--noise", type=float, default=0.12)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    out = Path(args.out)
    write_split(out, "train", args.train, args.seed, args.noise)
    write_split(out, "calib", args.calib, args.seed + 1, args.noise)
    images_path, labels_path = write_split(
        out, "test", args.test, args.seed + 2, args.noise
    )

    # first test image as a ready-made propagation input
    dataset = read_idx(images_path, labels_path)
    x0_path = out / "x0.csv"
    with open(x0_path, "w") as fh:
        fh.write(",".join(repr(v) for v in dataset.vectors[0]) + "\n")
    print(f"wrote train/calib/test IDX pairs and {x0_path} under {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
