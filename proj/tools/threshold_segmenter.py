#!/usr/bin/env python3
"""Toy segmenter speaking the crater bundle protocol.

Thresholds a grayscale version of the image and emits one segment per
8-connected bright component. Good enough for synthetic fields and for
exercising the subprocess path; not a crater detector.

    threshold_segmenter.py --image IN.png --out BUNDLE_DIR [--threshold 120]
"""
import argparse
import json
import os
import sys

import numpy as np
from PIL import Image
from scipy import ndimage


def rle(mask):
    flat = mask.ravel().astype(np.int8)
    change = np.flatnonzero(np.diff(flat)) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    runs = np.diff(bounds).tolist()
    if flat.size and flat[0]:
        runs = [0] + runs
    return runs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--image", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--threshold", type=int, default=120)
    args = ap.parse_args()

    img = np.asarray(Image.open(args.image).convert("L"))
    h, w = img.shape
    labels, n = ndimage.label(img > args.threshold, structure=np.ones((3, 3), dtype=int))
    segments = []
    for i, sl in enumerate(ndimage.find_objects(labels)):
        mask = labels == i + 1
        ys, xs = sl
        segments.append({
            "id": "c%04d" % i,
            "rle": rle(mask),
            "area": int(mask.sum()),
            "bbox": [xs.start, ys.start, xs.stop - xs.start, ys.stop - ys.start],
            "quality": 1.0,
            "stability": 1.0,
        })

    os.makedirs(args.out, exist_ok=True)
    manifest = {
        "version": 1,
        "image": {"width": w, "height": h, "source": os.path.basename(args.image)},
        "order": "row-major",
        "segments": segments,
    }
    with open(os.path.join(args.out, "manifest.json"), "w") as f:
        json.dump(manifest, f)
    print("%d segments" % n, file=sys.stderr)


if __name__ == "__main__":
    main()
