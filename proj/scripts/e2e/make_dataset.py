"""Builds a tiny two-image dataset under the directory given as argv[1]."""

import json
import os
import struct
import sys


def lseg(path, w, h, ids):
    with open(path, "wb") as f:
        f.write(b"LSEG")
        f.write(struct.pack("<II", w, h))
        f.write(struct.pack(f"<{w * h}H", *ids))


def main():
    work = sys.argv[1]
    os.makedirs(os.path.join(work, "maps"), exist_ok=True)
    a = [0] * 8 + [1] * 8
    b = [1] * 4 + [2] * 8 + [65535] * 4
    lseg(os.path.join(work, "maps", "a.lseg"), 4, 4, a)
    lseg(os.path.join(work, "maps", "b.lseg"), 4, 4, b)
    manifest = {
        "categories": [
            {"id": 0, "name": "sky", "aliases": ["heavens"]},
            {"id": 1, "name": "road", "aliases": []},
            {"id": 2, "name": "cat", "aliases": ["kitty"]},
        ],
        "images": [
            {"id": "a", "labelmap": "maps/a.lseg", "present": [0, 1]},
            {"id": "b", "labelmap": "maps/b.lseg", "present": [1, 2]},
        ],
    }
    with open(os.path.join(work, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)


if __name__ == "__main__":
    main()
