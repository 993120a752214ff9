#!/usr/bin/env python3
"""Generates the hexagonal test meshes in data/meshes/.

Regular hexagon with unit circumradius centered at the origin, triangulated
by the uniform triangular lattice with side length 1/n. All elements are
equilateral with diameter 1/n, so the interior contains a structured block
covering any centered box. Boundary edges carry physical tag 1.

Usage: python3 scripts/make_hexagon_meshes.py [n ...]
Defaults to n = 10, 20, 40.
"""

import math
import sys
from collections import Counter
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "data" / "meshes"


def hexagon_mesh(n):
    s = 1.0 / n
    row_h = s * math.sqrt(3.0) / 2.0

    # Vertices row by row, j in [-n, n]; row j has 2n+1-|j| vertices.
    index = {}
    vertices = []
    for j in range(-n, n + 1):
        count = 2 * n + 1 - abs(j)
        x0 = -0.5 * s * (count - 1)
        for i in range(count):
            index[(i, j)] = len(vertices)
            vertices.append((x0 + i * s, j * row_h))

    triangles = []

    def add(a, b, c):
        (ax, ay), (bx, by), (cx, cy) = vertices[a], vertices[b], vertices[c]
        if (bx - ax) * (cy - ay) - (by - ay) * (cx - ax) < 0.0:
            b, c = c, b
        triangles.append((a, b, c))

    for j in range(-n, n):
        lower = 2 * n + 1 - abs(j)
        upper = 2 * n + 1 - abs(j + 1)
        if upper == lower - 1:  # narrowing upwards (j >= 0)
            for i in range(upper):
                add(index[(i, j)], index[(i + 1, j)], index[(i, j + 1)])
            for i in range(upper - 1):
                add(index[(i + 1, j)], index[(i + 1, j + 1)], index[(i, j + 1)])
        else:  # widening upwards (j < 0)
            for i in range(lower - 1):
                add(index[(i, j)], index[(i + 1, j)], index[(i + 1, j + 1)])
            for i in range(lower):
                add(index[(i, j)], index[(i + 1, j + 1)], index[(i, j + 1)])

    edge_count = Counter()
    for a, b, c in triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            edge_count[(min(u, v), max(u, v))] += 1
    boundary = sorted(e for e, cnt in edge_count.items() if cnt == 1)

    return vertices, triangles, boundary


def write_msh(path, vertices, triangles, boundary):
    with open(path, "w") as f:
        f.write("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n")
        f.write("$Nodes\n%d\n" % len(vertices))
        for i, (x, y) in enumerate(vertices, start=1):
            f.write("%d %.17g %.17g 0\n" % (i, x, y))
        f.write("$EndNodes\n")
        f.write("$Elements\n%d\n" % (len(boundary) + len(triangles)))
        eid = 1
        for a, b in boundary:
            f.write("%d 1 2 1 1 %d %d\n" % (eid, a + 1, b + 1))
            eid += 1
        for a, b, c in triangles:
            f.write("%d 2 2 0 0 %d %d %d\n" % (eid, a + 1, b + 1, c + 1))
            eid += 1
        f.write("$EndElements\n")


def main():
    sizes = [int(a) for a in sys.argv[1:]] or [10, 20, 40]
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    for n in sizes:
        vertices, triangles, boundary = hexagon_mesh(n)
        assert len(triangles) == 6 * n * n, (n, len(triangles))
        assert len(boundary) == 6 * n, (n, len(boundary))
        path = OUT_DIR / ("hexagon_r%d.msh" % n)
        write_msh(path, vertices, triangles, boundary)
        print("wrote %s: %d vertices, %d triangles" % (path, len(vertices), len(triangles)))


if __name__ == "__main__":
    main()
