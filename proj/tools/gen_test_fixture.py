#!/usr/bin/env python3
"""Generates the bundled synthetic test manifest fixture:
100 images carrying 1,685 annotation pairs in total."""
import json
import pathlib
import random

N_IMAGES = 100
TOTAL_PAIRS = 1685
W, H = 640, 480
LIGHTING = ["natural", "dim", "bright"]
BACKGROUNDS = ["clinic", "home", "studio", "ward"]


def acupoint_name(i):
    return "Zusanli" if i == 36 else f"acupoint_{i:02d}"


def main():
    rng = random.Random(20240611)
    # 85 images with 17 pairs + 15 with 16 pairs = 1685.
    per_image = [17] * 85 + [16] * 15
    assert sum(per_image) == TOTAL_PAIRS

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures" / "test_manifest.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as f:
        next_id = 0
        for i in range(N_IMAGES):
            anns = []
            for _ in range(per_image[i]):
                aid = next_id % 60
                next_id += 1
                w = rng.randint(12, 60)
                h = rng.randint(12, 60)
                x1 = rng.randint(0, W - w - 1)
                y1 = rng.randint(0, H - h - 1)
                anns.append({
                    "acupoint_id": aid,
                    "name": acupoint_name(aid),
                    "box_px": [x1, y1, x1 + w, y1 + h],
                })
            rec = {
                "image": f"img_{i:03d}.png",
                "width": W,
                "height": H,
                "depth": None,
                "lighting": LIGHTING[i % 3],
                "background": BACKGROUNDS[i % 4],
                "annotations": anns,
            }
            f.write(json.dumps(rec) + "\n")
    print(f"wrote {out}: {N_IMAGES} images, {TOTAL_PAIRS} pairs")


if __name__ == "__main__":
    main()
