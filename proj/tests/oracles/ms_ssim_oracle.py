#!/usr/bin/env python3
# Copyright 2026 The qfselect Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Independent MS-SSIM for the pairs written by dump_ms_ssim_pairs.

Uses tf.image.ssim_multiscale on the BT.601 luma plane with the default
11x11 / sigma 1.5 window, k1 0.01, k2 0.03, max_val 255 and the standard
five scale weights, renormalized to sum to 1.

Usage: ms_ssim_oracle.py <pair_dir>
Prints "<index> <value>" per pair; the values are frozen in
quality_metrics_test.cc.
"""

import pathlib
import sys

import numpy as np
from PIL import Image
import tensorflow as tf

WEIGHTS = np.array([0.0448, 0.2856, 0.3001, 0.2363, 0.1333])


def luma(path):
  rgb = np.asarray(Image.open(path).convert("RGB"), dtype=np.float64)
  return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def main():
  pair_dir = pathlib.Path(sys.argv[1])
  weights = tuple(WEIGHTS / WEIGHTS.sum())
  for i in range(10):
    a = luma(pair_dir / f"pair_{i:02d}_a.ppm")[None, :, :, None]
    b = luma(pair_dir / f"pair_{i:02d}_b.ppm")[None, :, :, None]
    value = tf.image.ssim_multiscale(
        tf.constant(a, tf.float64), tf.constant(b, tf.float64), max_val=255.0,
        power_factors=weights, filter_size=11, filter_sigma=1.5, k1=0.01,
        k2=0.03)
    print(f"{i} {float(value.numpy()[0]):.10f}")


if __name__ == "__main__":
  main()
