"""Smoke test for the geosep_py extension module.

Build and install first:
    pip install --no-build-isolation -e crates/py
"""

import json
import math
import tempfile

import geosep_py as gs


def main():
    grid = gs.Grid(64, 2, 4)
    assert grid.size == 64 and grid.scales == (2, 4)

    point = gs.point_phantom(grid, [(0.75, 0.5), (0.2, 0.2)])
    curve, factor = gs.match_energies(point, gs.circle_phantom(grid))
    assert factor > 0
    mix = point + curve

    pair = gs.FramePair(grid)
    for frame in ("wavelet", "curvelet"):
        c = pair.analysis(frame, mix)
        assert len(c) == pair.coefficient_count(frame)
        back = pair.synthesis(frame, c)
        err = (back - mix).norm() / mix.norm()
        assert err < 1e-10, (frame, err)
        energy = math.sqrt(sum(v * v for v in c))
        assert abs(energy - mix.norm()) < 1e-9 * mix.norm(), frame

    sep = gs.separate(pair, mix, tol=1e-3, max_iter=5000)
    assert not sep.degraded
    # Curve routing keeps the residual inside the curve part.
    assert (sep.point + sep.curve - mix).norm() < 1e-6 * mix.norm()
    metrics = sep.metrics(point, curve)
    print("ratios:", [(m["j"], round(m["ratio"], 4)) for m in metrics["scales"]])
    assert [s["j"] for s in sep.subbands()][:3] == [2, 3, 4]

    rep = gs.coherence(pair, 3, [(0.75, 0.5), (0.2, 0.2)], point, curve)
    print("coherence j=3:", {k: rep[k] for k in ("size_point_cluster", "size_curve_cluster", "kappa_upper")})
    assert rep["size_point_cluster"] > 0 and rep["size_curve_cluster"] > 0

    inst = gs.TinyInstance.random(7)
    assert inst.kappa_upper() < 0.5
    again = gs.TinyInstance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    s1, s2, obj = inst.exact_separation()
    assert all(abs(a + b - s) < 1e-9 for a, b, s in zip(s1, s2, inst.signal))
    report = inst.verify_bound()
    assert report["applicable"] and report["satisfied"], report

    clean = gs.oracle_sweep("clean", 20, seed=1)
    assert clean["violations"] == 0, clean
    halved = gs.oracle_sweep("adversarial", 5, seed=1, bound_factor=0.5)
    print("halved-bound violations:", halved["violations"], "of", halved["instances"])

    with tempfile.TemporaryDirectory() as d:
        code = gs.run_cli(["gen", "--grid", "64", "--scales", "2..4", "--out", d])
        assert code == 0
        with open(f"{d}/phantom.json") as f:
            assert json.load(f)["schema_version"] == 1

    print("smoke test OK")


if __name__ == "__main__":
    main()
