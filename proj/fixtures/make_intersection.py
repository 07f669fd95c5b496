#!/usr/bin/env python3
"""Regenerates intersection.json (crossing-traffic fixture)."""
import json
import math

HORIZON = 33
DT = 0.1

obstacle_poses = []
for t in range(HORIZON + 1):
    y = -2.5 + 0.4 * t  # crossing vehicle, 4 m/s northbound
    obstacle_poses.append([18.0, round(y, 6), round(math.pi / 2, 6)])

scenario = {
    "dt": DT,
    "horizon": HORIZON,
    "lanelets": [
        {"width": 4.0, "centerline": [[-20.0, 0.0], [140.0, 0.0]]}
    ],
    "obstacles": [
        {"length": 4.3, "width": 1.7, "poses": obstacle_poses}
    ],
    "planning_problem": {
        "initial_state": {
            "x": 0.0,
            "y": 0.0,
            "orientation": 0.0,
            "velocity": 8.0,
            "steering_angle": 0.0,
        },
        "goal": {
            "center": [34.0, 0.0],
            "half_extents": [4.0, 3.0],
            "time_interval": [31, 33],
        },
    },
}

with open("intersection.json", "w") as f:
    json.dump(scenario, f, indent=2)
    f.write("\n")
print("wrote intersection.json")
