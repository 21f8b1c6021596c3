#!/usr/bin/env python3
# Copyright 2026 The roomtrace Authors
# SPDX-License-Identifier: Apache-2.0
"""Stand-in for sam-runner: one square mask per prompt, written with the
same file layout and manifest as the real runner."""

import argparse
import json
import struct
import sys
import zlib
from pathlib import Path

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> str:
    h = FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def write_gray_png(path: Path, width: int, height: int, rows) -> None:
    def chunk(tag: bytes, body: bytes) -> bytes:
        return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body))

    raw = b"".join(b"\x00" + bytes(r) for r in rows)
    png = b"\x89PNG\r\n\x1a\n"
    png += chunk(b"IHDR", struct.pack(">IIBBBBB", width, height, 8, 0, 0, 0, 0))
    png += chunk(b"IDAT", zlib.compress(raw))
    png += chunk(b"IEND", b"")
    path.write_bytes(png)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--density", required=True)
    ap.add_argument("--frame", required=True)
    ap.add_argument("--prompts", required=True)
    ap.add_argument("--out", required=True)
    ap.add_argument("--mode", default="ok", choices=["ok", "fail", "bad-hash"])
    ap.add_argument("--half", type=int, default=4)
    args = ap.parse_args()

    if args.mode == "fail":
        print("fake runner: failing on request", file=sys.stderr)
        return 1
    for flag in (args.density, args.frame, args.prompts):
        if not Path(flag).is_file():
            print(f"fake runner: missing {flag}", file=sys.stderr)
            return 2

    frame_bytes = Path(args.frame).read_bytes()
    frame = json.loads(frame_bytes)
    width, height = frame["width"], frame["height"]
    prompts = json.loads(Path(args.prompts).read_text())["points"]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, p in enumerate(prompts):
        rows = []
        # PNG row n is raster row n.
        for n in range(height):
            rows.append([255 if abs(m - p["m"]) <= args.half and abs(n - p["n"]) <= args.half else 0
                         for m in range(width)])
        mask_id = f"sam_{k:03d}"
        write_gray_png(out / f"mask_{mask_id}.png", width, height, rows)
        entries.append({"id": mask_id, "file": f"mask_{mask_id}.png", "prompt_index": k,
                        "sam_score": 0.5 + 0.01 * k})

    frame_hash = fnv1a64(frame_bytes) if args.mode == "ok" else "0" * 16
    manifest = {"backend": "fake_sam_runner",
                "frame": {"width": width, "height": height, "frame_hash": frame_hash},
                "entries": entries}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
