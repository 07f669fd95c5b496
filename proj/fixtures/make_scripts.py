#!/usr/bin/env python3
"""Regenerates the mock-backend scripts (JSONL: one JSON string per line)."""
import json

COARSE_ID = "V_0.0_20.0_Vstep_4.0_SA_-1.066_1.066_SAstep_0.18_T_0.5_Model_BMW_320i"
FINE_ID = "V_0.0_20.0_Vstep_2.0_SA_-1.066_1.066_SAstep_0.18_T_0.5_Model_BMW_320i"

HEUR_INITIAL = "20 * orientation_to_goal_diff + 0.5 * time_cost + time_to_goal"
HEUR_PARTIAL = "20 * orientation_to_goal_diff + 0.5 * time_cost + acceleration_cost"
HEUR_REPAIRED = ("10 * orientation_to_goal_diff + 0.5 * time_cost + time_to_goal"
                 " + acceleration_cost + path_efficiency + steering_angle_cost"
                 " + steering_velocity_cost")


def response(pairs, heuristic, primitives_id):
    body = {"diagnoses": [{"diagnosis": d, "prescription": p} for d, p in pairs]}
    if heuristic is not None:
        body["patched_heuristic"] = heuristic
    body["motion_primitives_id"] = primitives_id
    return json.dumps(body)


def write(path, responses):
    with open(path, "w") as f:
        for r in responses:
            f.write(json.dumps(r) + "\n")
    print("wrote", path)


iter1 = response(
    [("the acceleration is not considered",
      "add the acceleration cost to the heuristic function")],
    HEUR_PARTIAL, COARSE_ID)

iter2 = response(
    [("the time to goal dominates the cost",
      "reduce the orientation weight and keep the acceleration cost")],
    None, FINE_ID)  # deliberately lacks patched_heuristic

iter3 = response(
    [("KeyError in heuristic function",
      "return the repaired heuristic under the required response key"),
     ("the acceleration is not considered",
      "add the acceleration cost to the heuristic function"),
     ("the velocity sampling is too coarse",
      "switch to the motion primitives with the finer velocity step")],
    HEUR_REPAIRED, FINE_ID)

write("case_study_session.jsonl", [iter1, iter2, iter3])

# One oversized but valid response: parses fine, blows the token budget.
padding = "x" * 40000
burn = response(
    [("padding " + padding, "padding prescription")],
    HEUR_REPAIRED, FINE_ID)
write("budget_burn.jsonl", [burn])

# Benchmark seeds: a repairing response and a no-op echo of the original.
write("bench_pass.jsonl", [iter3])
write("bench_fail.jsonl",
      [response([("nothing wrong", "keep the planner as it is")],
                HEUR_INITIAL, COARSE_ID)])
