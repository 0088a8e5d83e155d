#!/usr/bin/env python3
"""Writes the scripted backend scenarios used by the integration tests and
the demo configs."""

import json
import os

ROOT = os.path.join(os.path.dirname(__file__), "..")


def entry(role, cycle, occurrence, response, usage_in=400, usage_out=120, elapsed=1.0):
    if not isinstance(response, str):
        response = json.dumps(response)
    return {
        "role": role,
        "cycle": cycle,
        "occurrence": occurrence,
        "response": response,
        "usage": {"in": usage_in, "out": usage_out},
        "elapsed_s": elapsed,
    }


UNDERSTANDING_POOL = [
    {
        "Number": 1,
        "description": "Search the web for the phenomenon",
        "steps": [{"tool": "WebSearch", "input": "why does the spinning ball curve in flight"}],
    },
    {
        "Number": 2,
        "description": "Check the academic literature",
        "steps": [{"tool": "PaperSearch", "input": "curved flight of spinning ball"}],
    },
    {
        "Number": 3,
        "description": "Upscale the video and inspect the throw",
        "steps": [{"tool": "VideoSR", "input": "video.mp4 focus on the ball"}],
    },
]

CAPTION = ("A pitcher throws a spinning ball; mid-flight the ball curves sharply "
           "sideways before reaching the batter.")


def three_round():
    return [
        entry("captioner", 1, 1, CAPTION, 800, 150, 2.5),
        entry("planner", 1, 1, UNDERSTANDING_POOL, 1200, 350, 3.0),
        entry("evaluator", 1, 1, {"1": 0.9, "2": 0.1, "3": 0.1}, 600, 40, 1.2),
        entry("planner", 1, 2,
              "The ball may curve because spinning objects feel a sideways force.",
              900, 80, 2.0),
        entry("planner", 1, 3, "40", 300, 5, 0.5),
        entry("study", 1, 1, {
            "failure_analysis": "the web result was too generic to name the effect",
            "knowledge_summary": "the ball curves toward the side spinning against the airflow",
            "new_plans": [],
        }, 1000, 200, 2.2),

        entry("evaluator", 2, 1, {"2": 0.9, "3": 0.2}, 600, 40, 1.2),
        entry("planner", 2, 1,
              "Papers describe a pressure difference across a spinning ball.",
              900, 90, 2.0),
        entry("planner", 2, 2, "55", 300, 5, 0.5),
        entry("study", 2, 1, {
            "failure_analysis": "literature supports a spin force but the video needs checking",
            "knowledge_summary": "a sideways force acts on spinning balls moving through air",
            "new_plans": [{
                "Number": 4,
                "description": "Upscale frames to confirm the spin direction",
                "steps": [{"tool": "VideoSR", "input": "video.mp4 check ball spin direction"}],
            }],
        }, 1000, 220, 2.2),

        entry("evaluator", 3, 1, {"3": 0.3, "4": 0.9}, 600, 40, 1.2),
        entry("planner", 3, 1,
              "The spinning ball drags air around itself, lowering pressure on one side; "
              "this Magnus force curves the flight toward the low-pressure side.",
              900, 120, 2.0),
        entry("planner", 3, 2, "85", 300, 5, 0.5),
    ]


def always_45():
    entries = [
        entry("captioner", 1, 1, CAPTION, 800, 150, 2.5),
        entry("planner", 1, 1, UNDERSTANDING_POOL, 1200, 350, 3.0),
        entry("evaluator", 1, 1, {"1": 0.9, "2": 0.1, "3": 0.1}, 600, 40, 1.2),
        entry("planner", 1, 2, "Possibly a spin-related force.", 900, 80, 2.0),
        entry("planner", 1, 3, "45", 300, 5, 0.5),
        entry("study", 1, 1, {
            "failure_analysis": "not enough evidence yet",
            "knowledge_summary": "the curve follows the spin direction",
            "new_plans": [],
        }, 1000, 200, 2.2),
        # Forced-answer entry used when max_rounds=1.
        entry("planner", 1, 4, "Most likely a sideways force from the ball's spin.",
              700, 90, 1.5),
    ]
    for cycle, perceptual in ((2, {"2": 0.9, "3": 0.2}), (3, {"3": 0.9})):
        entries += [
            entry("evaluator", cycle, 1, perceptual, 600, 40, 1.2),
            entry("planner", cycle, 1, "Still only circumstantial evidence.", 900, 80, 2.0),
            entry("planner", cycle, 2, "45", 300, 5, 0.5),
            entry("study", cycle, 1, {
                "failure_analysis": "results remain inconclusive",
                "knowledge_summary": "",
                "new_plans": [],
            }, 1000, 150, 2.2),
        ]
    # max_rounds=3 forced answer.
    entries.append(entry("planner", 3, 3,
                         "Most likely a sideways force from the ball's spin.", 700, 90, 1.5))
    for cycle, plan_number in ((4, 4), (5, 5)):
        entries += [
            entry("evaluator", cycle, 1, {str(plan_number): 0.8}, 600, 40, 1.2),
            entry("captioner", cycle, 1,
                  "The replayed frames show the ball spinning clockwise as it curves.",
                  800, 140, 2.4),
            entry("planner", cycle, 1, "The spin is visible but the cause is still unnamed.",
                  900, 80, 2.0),
            entry("planner", cycle, 2, "45", 300, 5, 0.5),
        ]
        if cycle < 5:
            entries.append(entry("study", cycle, 1, {
                "failure_analysis": "the effect needs a name and mechanism",
                "knowledge_summary": "clockwise spin matches the curve direction",
                "new_plans": [],
            }, 1000, 150, 2.2))
    # max_rounds=5 forced answer.
    entries.append(entry("planner", 5, 3,
                         "Most likely a sideways force from the ball's spin.", 700, 90, 1.5))
    return entries


BOOKLET_POOL = [
    {
        "Number": 1,
        "description": "Gather procedure, safety notes and materials",
        "steps": [
            {"tool": "ProcedureSearch", "input": "cartesian diver experiment"},
            {"tool": "SafetyAlert", "input": "cartesian diver bottle squeezing"},
            {"tool": "EntityRecognition", "input": "cartesian diver procedure"},
        ],
    },
    {
        "Number": 2,
        "description": "Procedure only",
        "steps": [{"tool": "ProcedureSearch", "input": "cartesian diver steps"}],
    },
]

DIVER_DRAFT_V1 = {
    "topic": "The Cartesian Diver",
    "principle": "Buoyancy changes with pressure.",
    "introduction": "A tiny diver that sinks when you squeeze the bottle!",
    "steps": [
        "Fill a plastic bottle to the brim with water.",
        "Drop in a dropper that barely floats.",
    ],
    "safety": [],
    "summary": "Squeezing raises the pressure.",
}

DIVER_DRAFT_V2 = {
    "topic": "The Cartesian Diver",
    "principle": "Squeezing the bottle compresses the air bubble inside the diver, so it "
                 "displaces less water and its buoyancy drops below its weight.",
    "introduction": "Make a tiny diver rise and fall on your command!",
    "steps": [
        "Fill a plastic bottle to the brim with water.",
        "Partially fill the dropper so it only just floats, then lower it in.",
        "Screw the cap on tightly and squeeze the bottle; the diver sinks, release and it "
        "rises.",
    ],
    "safety": [
        {"text": "Use a plastic bottle, never glass.", "severity": "danger"},
        {"text": "Wipe up spills right away so the floor stays dry.", "severity": "caution"},
    ],
    "summary": "Higher pressure squeezes the trapped air, the diver displaces less water, and "
               "it sinks; releasing the bottle lets the air expand so the diver floats again.",
}


def booklet_diver():
    return [
        entry("booklet", 1, 1, BOOKLET_POOL, 1200, 320, 3.0),
        entry("evaluator", 1, 1, {"1": 0.9, "2": 0.2}, 600, 40, 1.2),
        entry("booklet", 1, 2, DIVER_DRAFT_V1, 1100, 260, 2.8),
        entry("booklet", 1, 3, {"relevance": 80, "instructional_quality": 55,
                                "attractiveness": 60, "educational_value": 75}, 500, 30, 1.0),
        entry("booklet", 1, 4, {
            "failure_analysis": "safety notes are missing and the steps stop early",
            "knowledge_summary": "a sealed squeezable bottle and a barely-floating dropper "
                                 "are essential",
            "new_plans": [{
                "Number": 3,
                "description": "Focused safety and materials pass",
                "steps": [
                    {"tool": "SafetyAlert", "input": "sealed bottle squeezing hazards"},
                    {"tool": "EntityRecognition", "input": "cartesian diver materials"},
                ],
            }],
        }, 1000, 220, 2.2),

        entry("evaluator", 2, 1, {"3": 0.9, "2": 0.3}, 600, 40, 1.2),
        entry("booklet", 2, 1, DIVER_DRAFT_V2, 1100, 300, 2.8),
        entry("booklet", 2, 2, {"relevance": 90, "instructional_quality": 85,
                                "attractiveness": 78, "educational_value": 88}, 500, 30, 1.0),
    ]


DEMO_POOL = [
    {
        "Number": 1,
        "description": "Search the web for collapsing can experiments",
        "steps": [{"tool": "WebSearch", "input": "heated can inverted into ice water collapses"}],
    },
    {
        "Number": 2,
        "description": "Check the academic literature on condensation pressure drops",
        "steps": [{"tool": "PaperSearch", "input": "steam condensation pressure collapse"}],
    },
]


def demo_ask():
    return [
        entry("captioner", 1, 1,
              "A soda can is heated over a flame, then flipped upside down into a bowl of "
              "ice water; the can crumples instantly with a loud pop.", 800, 160, 2.5),
        entry("planner", 1, 1,
              "Retrieved knowledge: the atmosphere presses on every surface; cooling steam "
              "condenses and the pressure inside a sealed container drops.", 1500, 180, 2.6),
        entry("planner", 1, 2, DEMO_POOL, 1200, 300, 3.0),
        entry("evaluator", 1, 1, {"1": 0.8, "2": 0.4}, 600, 40, 1.2),
        entry("planner", 1, 3,
              "Heating fills the can with steam and drives out the air. Plunging it into ice "
              "water condenses the steam almost instantly, so the pressure inside drops far "
              "below atmospheric pressure and the outside air crushes the can.", 900, 140, 2.0),
        entry("planner", 1, 4, "82", 300, 5, 0.5),
    ]


def demo_ask_booklet():
    # `ask --booklet`: the understanding pass ends at cycle 1, then the
    # booklet loop reuses the same gateway. Occurrence counters are shared
    # per (role, cycle), so the booklet's cycle-1 judge call lands on
    # evaluator occurrence 2.
    entries = demo_ask()
    for e in booklet_diver():
        if e["role"] == "evaluator" and e["cycle"] == 1:
            e = dict(e)
            e["occurrence"] = 2
        entries.append(e)
    return entries


def demo_judge():
    # Rubric scores for the six-pair mini benchmark: (relevance, accuracy)
    # per pair, judged in file order.
    scores = [("1", "1"), ("1", "1"), ("1", "1"), ("1", "0"), ("1", "1"), ("1", "0.5")]
    entries = []
    occ = 0
    for rel, acc in scores:
        occ += 1
        entries.append(entry("judge", 0, occ, rel, 350, 3, 0.6))
        occ += 1
        entries.append(entry("judge", 0, occ, acc, 380, 3, 0.7))
    return entries


def write(path, entries):
    path = os.path.join(ROOT, path)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path} ({len(entries)} entries)")


def main():
    write("tests/fixtures/scenarios/three_round.json", three_round())
    write("tests/fixtures/scenarios/always_45.json", always_45())
    write("tests/fixtures/scenarios/booklet_diver.json", booklet_diver())
    write("tests/fixtures/scenarios/ask_with_booklet.json", demo_ask_booklet())
    write("configs/demo_scenario.json", demo_ask())
    write("configs/demo_booklet_scenario.json", booklet_diver())
    write("configs/demo_judge_scenario.json", demo_judge())


if __name__ == "__main__":
    main()
