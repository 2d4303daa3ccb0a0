#!/usr/bin/env python3
# Copyright 2026 The incodec Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerate the grayscale PGM fixtures in tests/fixtures from scikit-image's
bundled sample images, plus one synthetic smooth-gradient image."""

import argparse
import pathlib

import numpy as np
from skimage import color, data, transform, util

TRAIN = ["astronaut", "camera", "chelsea", "coffee", "rocket", "coins",
         "motorcycle_left", "immunohistochemistry"]
HELDOUT = {"clock": "clock_motion", "moon": "moon"}
ROUNDTRIP = ["camera", "coins", "page"]


def load(name):
    if name == "motorcycle_left":
        img = data.stereo_motorcycle()[0]
    elif name == "clock_motion":
        img = data.clock()
    else:
        img = getattr(data, name)()
    if img.ndim == 3:
        img = color.rgb2gray(img[..., :3])
    return util.img_as_float(img)


def square(img, size):
    h, w = img.shape
    s = size / min(h, w)
    img = transform.resize(img, (max(size, round(h * s)), max(size, round(w * s))),
                           anti_aliasing=True)
    h, w = img.shape
    y, x = (h - size) // 2, (w - size) // 2
    return img[y:y + size, x:x + size]


def to_u8(img):
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def smooth_gradient(size):
    y, x = np.mgrid[0:size, 0:size] / (size - 1)
    v = 60 + 110 * x + 50 * y * y + 12 * np.sin(2.5 * x + 1.5 * y)
    return np.clip(np.rint(v), 0, 255).astype(np.uint8)


def write_pgm(path, a):
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (a.shape[1], a.shape[0]))
        f.write(a.tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=pathlib.Path(__file__).resolve().parent.parent
                    / "tests" / "fixtures", type=pathlib.Path)
    ap.add_argument("--train-size", type=int, default=256)
    ap.add_argument("--small-size", type=int, default=128)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    train = []
    for name in TRAIN:
        fname = f"train_{name}.pgm"
        write_pgm(args.out / fname, to_u8(square(load(name), args.train_size)))
        train.append(fname)
    (args.out / "train.txt").write_text("\n".join(train) + "\n")

    for label, name in HELDOUT.items():
        write_pgm(args.out / f"heldout_{label}.pgm",
                  to_u8(square(load(name), args.train_size)))

    for name in ROUNDTRIP:
        write_pgm(args.out / f"small_{name}.pgm", to_u8(square(load(name), args.small_size)))

    write_pgm(args.out / "smooth_gradient.pgm", smooth_gradient(args.small_size))


if __name__ == "__main__":
    main()
