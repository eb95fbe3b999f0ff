#!/usr/bin/env python3
# Copyright 2026 The arcnn Authors.
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

# Builds the 16-image grayscale corpus under tests/data/corpus from the
# CC0 / public-domain sample images bundled with scikit-image.
import os
import sys

import numpy as np
from skimage import data, io, transform

NAMES = [
    # training
    "astronaut", "brick", "camera", "coffee", "grass", "gravel",
    "moon", "page", "retina", "cell", "text", "hubble_deep_field",
    # held out
    "chelsea", "motorcycle_left", "coins", "rocket",
]
SIZE = 256


def luminance(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3:
        img = img[..., :3] @ np.array([0.299, 0.587, 0.114])
    elif img.dtype == bool:
        img = img * 255.0
    if img.max() <= 1.0:
        img = img * 255.0
    return img


def square(img):
    h, w = img.shape
    side = min(h, w)
    top, left = (h - side) // 2, (w - side) // 2
    img = img[top:top + side, left:left + side]
    return transform.resize(img, (SIZE, SIZE), order=3, anti_aliasing=True,
                            preserve_range=True)


def main(out_dir):
    os.makedirs(out_dir, exist_ok=True)
    for i, name in enumerate(NAMES):
        if name == "motorcycle_left":
            img = data.stereo_motorcycle()[0]
        else:
            img = getattr(data, name)()
        y = np.clip(np.rint(square(luminance(img))), 0, 255).astype(np.uint8)
        path = os.path.join(out_dir, f"{i:02d}_{name}.pgm")
        with open(path, "wb") as f:
            f.write(f"P5\n{SIZE} {SIZE}\n255\n".encode())
            f.write(y.tobytes())
        print(path)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/corpus")
