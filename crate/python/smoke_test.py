"""Smoke test for the `pursuit` extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import json
import pathlib

import pursuit

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    names = pursuit.Environment.fixture_names()
    assert "l_shaped" in names, names

    env = pursuit.Environment.from_json((ROOT / "environments" / "l_shaped.json").read_text())
    assert abs(env.area - pursuit.Environment.fixture("l_shaped").area) < 1e-9
    assert env.contains_point((1.0, 1.0))
    assert not env.contains_point((-1.0, 1.0))

    vis = env.visibility_polygon((1.0, 1.0))
    assert len(vis) >= 3

    # Both pursuers in the same spot leave at least one shadow around the corner.
    shadows = env.shadows([(9.0, 2.0), (9.0, 2.0)])
    assert shadows and all(s["area"] > 0 for s in shadows)

    rel = pursuit.influence_relation(env, [(9.0, 2.0), (9.0, 2.0)], [(9.0, 2.0), (8.0, 2.0)])
    assert len(rel) == len(shadows)

    walk = pursuit.web_walk(env, seed=1)
    assert len(walk["walk"]) > 0

    result = pursuit.plan(env, 2, sampler="rcs", seed=7, timeout=60.0)
    assert result["outcome"] == "solution", result["outcome"]
    waypoints = result["solution"]["waypoints"]
    report = pursuit.check_solution(env, waypoints)
    assert report["full_team"]["passed"]
    assert all(v["passed"] for v in report["exclusions"])

    try:
        pursuit.plan(env, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("n = 1 must be rejected")

    print(json.dumps({"waypoints": len(waypoints), "stats": result["stats"]}, indent=2))
    print("smoke test passed")


if __name__ == "__main__":
    main()
