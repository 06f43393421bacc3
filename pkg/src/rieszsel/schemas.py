"""JSON Schemas (draft 2020-12) for each subcommand's JSON output.

Non-finite floats are emitted as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""

NUM = {"type": "number"}
NUM_OR_INF = {"anyOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}
INT = {"type": "integer"}
BOOL = {"type": "boolean"}
STR = {"type": "string"}
INDICES = {"type": "array", "items": {"type": "integer", "minimum": 0}}
LABELS = {"type": "array", "items": STR}
SUBSETS = {"type": "array", "items": INDICES}


def _obj(props, required=None, extra=False):
    return {
        "type": "object",
        "properties": props,
        "required": sorted(props if required is None else required),
        "additionalProperties": extra,
    }


VIOLATION = _obj({"axiom": STR, "witness": INDICES, "detail": STR})

SCHEMAS = {
    "energy": _obj({"energy": NUM, "mpd": NUM_OR_INF, "subset": LABELS, "indices": INDICES}),
    "solve-tree": _obj({"energy": NUM, "subset": LABELS, "indices": INDICES, "k": INT, "s": NUM}),
    "brute": _obj({
        "optimum": NUM_OR_INF, "witnesses": SUBSETS, "enumerated": INT,
        "labels": {"type": "array", "items": LABELS},
    }),
    "mpd-line": _obj({
        "value": NUM, "subset": INDICES, "xs": {"type": "array", "items": NUM},
        "method": {"enum": ["dp", "search"]},
    }),
    "reduce-clique": _obj(
        {
            "k": INT, "s": NUM, "T": NUM,
            "provenance": _obj({"gap": {"type": "array", "items": NUM}, "s": NUM, "T": NUM}),
            "min_energy": NUM, "clique_exists": BOOL, "decision": BOOL, "equivalent": BOOL,
        },
        required=["k", "s", "T", "provenance"],
    ),
    "reduce-gis": {
        "oneOf": [
            _obj({"trivial": {"const": True}, "reason": STR, "answer": BOOL, "k": INT}),
            _obj(
                {
                    "trivial": {"const": False}, "k": INT, "s": NUM, "T": NUM,
                    "provenance": _obj({
                        "D_min": NUM, "delta_max": NUM, "exponent_bound": NUM, "s": NUM,
                        "T": NUM, "log_T": NUM,
                        "realizing_pairs": _obj({"D_min": INDICES, "delta_max": INDICES}),
                    }),
                    "independent_exists": BOOL, "decision": BOOL, "equivalent": BOOL,
                    "separated": BOOL,
                },
                required=["trivial", "k", "s", "T", "provenance"],
            ),
        ]
    },
    "large-s": _obj(
        {
            "s0": NUM, "D_star": NUM, "R": NUM_OR_INF, "all_optimal": BOOL,
            "s": NUM, "minimizers": SUBSETS, "all_mpd_optimal": BOOL,
        },
        required=["s0", "D_star", "R", "all_optimal"],
    ),
    "bounds": _obj({
        "r": NUM, "s": NUM, "layers": INT, "measured": NUM, "bound": NUM, "slack": NUM,
        "total_energy": NUM, "total_bound": NUM, "ok": BOOL, "zeta": NUM,
        "overlap_forbidden": NUM, "overlap_admissible": NUM,
    }),
    "counterexample": _obj(
        {
            "found": BOOL, "tried": INT,
            "config": _obj({
                "n_min": INT, "n_max": INT, "k_min": INT, "k_max": INT, "s": NUM, "seed": INT,
                "budget": INT, "generator": {"enum": ["random", "grid"]}, "grid_size": INT,
                "objective": {"enum": ["riesz", "mpd"]},
            }),
            "points": {"type": "array", "items": NUM}, "k": INT, "dp_subset": INDICES,
            "dp_value": NUM_OR_INF, "dp_true": NUM_OR_INF, "optimal_subset": INDICES, "optimum": NUM_OR_INF,
        },
        required=["found", "tried", "config"],
    ),
    "validate": {
        "oneOf": [
            _obj({
                "kind": {"const": "tree"}, "valid": BOOL, "leaves": INT,
                "violations": {"type": "array", "items": VIOLATION},
                "ultrametric_witness": {"anyOf": [{"type": "null"}, INDICES]},
            }),
            _obj({
                "kind": {"const": "metric"}, "valid": BOOL, "n": INT,
                "violations": {"type": "array", "items": VIOLATION}, "ultrametric": BOOL,
            }),
        ]
    },
}
