"""Deterministic synthetic fixtures: vessel-like clouds and wrench profiles.

``python -m rcmadmit.harness.fixtures <dir>`` regenerates the data files the
shipped configurations reference (cloud and profile text files). Everything
is seeded, so regeneration is reproducible.
"""

import sys
from pathlib import Path

import numpy as np

from ..kinematics import default_chain, forward_kinematics
from .profiles import guidance_profile, press_profile

Q0_DEG = (20.0, 50.0, 0.0, -70.0, 0.0, 60.0, 0.0)


def tube_cloud(center, axis, length, radius, n_points=1200, seed=0,
               bow_radius=None, bow_direction=(0.0, 0.0, 1.0)):
    """Points on a cylinder surface, a stand-in for a vessel segment.

    ``bow_radius`` curves the centerline (circular to second order) so the
    tube ends lift toward ``bow_direction``, like a vessel wrapping an organ.
    """
    rng = np.random.default_rng(seed)
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    ref = np.array([0.0, 0.0, 1.0])
    if abs(axis @ ref) > 0.9:
        ref = np.array([1.0, 0.0, 0.0])
    u = np.cross(axis, ref)
    u /= np.linalg.norm(u)
    v = np.cross(axis, u)
    s = rng.uniform(-0.5, 0.5, n_points) * length
    theta = rng.uniform(0.0, 2.0 * np.pi, n_points)
    pts = (
        np.asarray(center, dtype=float)
        + np.outer(s, axis)
        + radius * (np.outer(np.cos(theta), u) + np.outer(np.sin(theta), v))
    )
    if bow_radius is not None:
        lift = np.asarray(bow_direction, dtype=float)
        lift = lift / np.linalg.norm(lift)
        pts = pts + np.outer(s**2 / (2.0 * bow_radius), lift)
    return pts


def write_cloud(path, points, label=None, context=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# x y z [label] [k]\n")
        for p in points:
            row = f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r}"
            if label:
                row += f" {label}"
            fh.write(row + "\n")
        if context is not None:
            for p in context:
                fh.write(f"{float(p[0])!r} {float(p[1])!r} {float(p[2])!r} context\n")


def initial_tool_geometry():
    """Tip position and axis of the default chain at the standard start."""
    chain = default_chain()
    pose = forward_kinematics(chain, np.deg2rad(Q0_DEG))
    return chain, pose


def make_data_files(out_dir, seed=0):
    """Write every cloud/profile file the shipped configs reference."""
    out_dir = Path(out_dir)
    chain, pose = initial_tool_geometry()
    tip = pose.p_t
    n_t = pose.n_t

    # Vessel bed below the initial tip (tip-mode target): three bowed tubes
    # form a shallow basin (side tubes raised, all ends lifting), so a
    # sustained frictionless press settles in it instead of skating off a
    # convex surface or sliding off an open end.
    bed_center = tip + 0.030 * n_t
    tubes = [
        tube_cloud(
            center=bed_center + np.array([dx, 0.0, dz]),
            axis=np.array([0.0, 1.0, 0.0]),
            length=0.16,
            radius=0.004,
            n_points=n_pts,
            seed=seed + i,
            bow_radius=0.05,
        )
        for i, (dx, dz, n_pts) in enumerate(
            ((-0.013, 0.008, 2500), (0.0, 0.0, 4000), (0.013, 0.008, 2500))
        )
    ]
    write_cloud(out_dir / "clouds" / "vessel_tip.xyz", np.vstack(tubes))

    # Vessel tube beside the shaft (capsule-mode target). The port sits at
    # sigma ~ 0.32 of the tool segment; the tube flanks the inside section.
    # Capsule-mode target: the same organ bed under the tip plus two tubes
    # stacked vertically forming a groove that faces the shaft from +y. The
    # bed anchors the tip (the press carries a small axial-down component,
    # the hand "holding the tool in"), and the pivot toward the groove slides
    # the tip along the bed valley, its free direction. A single tube crown
    # is a saddle for a crossing shaft and it scrapes off; a groove without
    # the bed lets contact asymmetry squeeze the tool out axially.
    shaft_point = tip - 0.18 * chain.tool_length * n_t
    pair = [
        tube_cloud(
            center=shaft_point + np.array([0.0, 0.025, dz]),
            axis=np.array([1.0, 0.0, 0.0]),
            length=0.10,
            radius=0.004,
            n_points=2500,
            seed=seed + 10 + i,
            bow_radius=0.15,
            bow_direction=(0.0, -1.0, 0.0),
        )
        for i, dz in enumerate((-0.011, 0.011))
    ]
    write_cloud(out_dir / "clouds" / "vessel_shaft.xyz", np.vstack(pair + tubes))

    profiles = out_dir / "profiles"
    profiles.mkdir(parents=True, exist_ok=True)
    guidance_profile(duration=30.0, seed=seed).save(profiles / "guidance_30s.txt")
    press_profile(
        direction=np.concatenate([n_t, np.zeros(3)]),
        peak=30.0,
        duration=20.0,
        rise=6.0,
        hold=6.0,
        release=4.0,
        settle=2.0,
    ).save(profiles / "press_tip.txt")
    # Lateral push at the handle pivots the shaft toward the vessel pair;
    # the axial-down component keeps the tip seated on the bed.
    press_profile(
        direction=np.array([0.0, -1.0, -0.25, 0.0, 0.0, 0.0]),
        peak=30.0,
        duration=22.0,
        rise=10.0,
        hold=6.0,
        release=4.0,
        settle=2.0,
    ).save(profiles / "press_capsule.txt")
    return out_dir


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "configs"
    made = make_data_files(target)
    print(f"fixture data written under {made}")
