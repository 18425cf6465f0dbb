"""Smoke test for the pyhypext module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import json
import math
import sys
import tempfile

import pyhypext as hx


def main():
    sq = hx.CellSet.full(6)
    assert len(sq) == 64 * 64 and sq.measure == (1, 1)

    g = hx.Grid.reference()
    r = hx.ratio(sq, g)
    assert abs(r - 4.963690063467746) < 1e-9, r

    # a tile and its rescaled copy on the matched grid
    t = hx.CellSet.tile(1, 0, 1, 1, 3)
    small = hx.Grid(4.0, 4.0, 9, 16)
    shape, re, im = hx.extend(t, small)
    assert shape == [9, 16, 16] and len(re) == len(im) == 9 * 16 * 16
    peak = max(math.hypot(a, b) for a, b in zip(re, im))
    assert peak <= 0.25 + 1e-12, peak

    back = hx.CellSet.from_json(t.to_json())
    assert back.cells == t.cells

    parts = hx.decompose(t)
    assert [(k, j) for k, j, _ in parts] == [(1, 1)], parts

    try:
        hx.CellSet(3, [(9, 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("out of range cell accepted")

    with tempfile.TemporaryDirectory() as out:
        config = json.dumps(
            {
                "r": "7/3",
                "grid": {"r": [4.0, 4.0, 4.0], "m": [9, 16, 16]},
                "scan": {"rows": [[1, 1], [2, 2], [3, 3]], "cells_log2": 1, "refine": 1},
            }
        )
        report = json.loads(hx.run_command("scan-bilinear", out, config))
        assert report["command"] == "scan-bilinear"
        assert all(c["passed"] for c in report["checks"]), report["checks"]

    print(f"ok: unit square ratio {r:.6f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
