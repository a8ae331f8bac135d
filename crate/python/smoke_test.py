"""Smoke test for the Python bindings.

Build and install first:

    pip install --no-build-isolation -e crates/py
"""

import math
import pathlib
import sys

import solidtorus as st

ROOT = pathlib.Path(__file__).resolve().parent.parent


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    tri, angles = st.load_instance(str(ROOT / "instances" / "one_vertex.json"))
    assert (tri.num_faces, tri.num_edges, tri.num_vertices) == (2, 3, 1)
    assert angles.is_exact

    report = st.validate(tri, angles)
    assert report["admissible"], report

    sol = st.solve(tri, angles, exact=True)
    assert sol["status"] == "feasible"
    assert all(x > 0 for x in sol["theta"])

    r = st.realize(tri, angles)
    assert r["volume"] > 0
    assert r["report"]["gradient_norm"] <= 1e-10
    assert close(r["core"]["cone_angle"], math.pi / 3, 1e-9)

    cusp = st.realize(tri, angles.with_cone_angle(0.0))
    assert close(cusp["volume"], 6 * st.lobachevsky(math.pi / 3), 1e-9)
    assert "cusp_shape" in cusp["core"]

    bad = st.solve(tri, angles.with_cone_angle(2.5))
    assert bad["status"] == "infeasible"
    assert bad["certificate"]["condition"] == "compression"

    try:
        st.realize(tri, angles.with_cone_angle(2.5))
    except st.SolidTorusError:
        pass
    else:
        raise AssertionError("expected SolidTorusError")

    rand = st.Triangulation.random(12, seed=5)
    m = rand.symplectic_matrix()
    assert abs(m[-2][-1]) == 2 and m[-1][-2] == -m[-2][-1]

    again = st.Triangulation.from_json(tri.to_json())
    assert again.meridian_vector() == tri.meridian_vector()

    assert close(3 * st.lobachevsky(math.pi / 3), 1.0149416064096536, 1e-12)
    assert close(st.volume([math.pi / 3] * 6), 2.029883212819307, 1e-12)
    print("python smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
