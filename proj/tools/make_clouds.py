"""Regenerates the synthetic PLY fixtures under data/clouds (seeded, deterministic)."""
import math
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "clouds"


def write(name, points, comment):
    lines = ["ply", "format ascii 1.0", f"comment {comment}", f"element vertex {len(points)}",
             "property float x", "property float y", "property float z", "end_header"]
    lines += ["%.6f %.6f %.6f" % p for p in points]
    (OUT / name).write_text("\n".join(lines) + "\n")


def box_surface(rng, center, half, n):
    pts = []
    for _ in range(n):
        axis = rng.randrange(3)
        p = [rng.uniform(-h, h) for h in half]
        p[axis] = half[axis] if rng.random() < 0.5 else -half[axis]
        pts.append(tuple(c + q for c, q in zip(center, p)))
    return pts


def cube():
    pts = [(x, y, z) for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)]
    pts += [(0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (0.0, -0.5, 0.25), (0.1, 0.2, 0.5)]
    write("cube.ply", pts, "unit cube corners with interior and face points")


def rover():
    rng = random.Random(20240517)
    pts = box_surface(rng, (0.0, 0.0, 0.03), (0.17, 0.11, 0.05), 3000)
    pts += box_surface(rng, (0.06, 0.0, 0.1), (0.05, 0.05, 0.03), 600)
    for cx in (-0.12, 0.12):
        for cy in (-0.13, 0.13):
            for _ in range(400):
                a = rng.uniform(0.0, 2.0 * math.pi)
                r = 0.06 * math.sqrt(rng.random())
                pts.append((cx + r * math.cos(a), cy + rng.uniform(-0.025, 0.025), -0.03 + r * math.sin(a)))
    pts = [tuple(c + rng.gauss(0.0, 0.002) for c in p) for p in pts]
    write("rover_dense.ply", pts, "synthetic rover body with four wheels and sensor noise")


def goal_object():
    rng = random.Random(7)
    pts = []
    while len(pts) < 2500:
        v = [rng.gauss(0.0, 1.0) for _ in range(3)]
        n = math.sqrt(sum(c * c for c in v))
        r = 0.2 * (0.9 + 0.1 * rng.random())
        pts.append((v[0] / n * r, v[1] / n * r, 0.6 * v[2] / n * r))
    write("goal_object.ply", pts, "synthetic flattened ellipsoid standing in for a reconstructed object")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    cube()
    rover()
    goal_object()
