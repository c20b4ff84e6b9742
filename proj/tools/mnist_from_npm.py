#!/usr/bin/env python3
# Copyright 2026 The voltsnn Authors
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
"""Convert the MNIST digits bundled in the `mnist` npm package to IDX files.

The package (MIT, github.com/cazala/mnist) ships 10,000 MNIST test digits as
JSON arrays of intensities in [0, 1] rounded to three decimals.  This script
recovers the 8-bit pixels, shuffles with a fixed seed and writes a train/test
split as gzipped IDX files:

    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/mnist_from_npm.py package/src/digits data/mnist
"""

import argparse
import gzip
import json
import pathlib
import random
import struct

SIDE = 28


def load_digits(src):
    samples = []
    for label in range(10):
        raw = json.loads((src / f"{label}.json").read_text())["data"]
        n = len(raw) // (SIDE * SIDE)
        for k in range(n):
            px = raw[k * SIDE * SIDE:(k + 1) * SIDE * SIDE]
            samples.append((label, bytes(min(255, max(0, round(v * 255))) for v in px)))
    return samples


def write_idx(path, samples):
    with gzip.GzipFile(path.with_name(path.name + "-images-idx3-ubyte.gz"), "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), SIDE, SIDE))
        for _, px in samples:
            f.write(px)
    with gzip.GzipFile(path.with_name(path.name + "-labels-idx1-ubyte.gz"), "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for label, _ in samples))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--train", type=int, default=8000)
    ap.add_argument("--seed", type=int, default=20220601)
    args = ap.parse_args()

    samples = load_digits(args.digits_dir)
    random.Random(args.seed).shuffle(samples)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    write_idx(args.out_dir / "train", samples[:args.train])
    write_idx(args.out_dir / "t10k", samples[args.train:])
    print(f"{len(samples)} samples: {args.train} train, {len(samples) - args.train} test")


if __name__ == "__main__":
    main()
