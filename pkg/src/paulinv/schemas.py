"""JSON Schema (draft 2020-12) documents for the ``--json`` outputs of the CLI."""

_NUM01 = {"type": "number", "minimum": 0, "maximum": 1}
_TASK = {"enum": ["invert", "conjugate", "transpose"]}
_SEED = {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1}
_HASH = {"type": "string", "pattern": "^[0-9a-f]{16}$"}

_SINGLE = {
    "type": "object",
    "required": ["status", "v"],
    "properties": {
        "status": {"enum": ["possible", "impossible"]},
        "v": {"type": ["string", "null"]},
    },
    "additionalProperties": False,
}

ANALYSIS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "analysis summary",
    "type": "object",
    "required": ["task", "support_hash", "n_qubits", "n_terms", "pairwise_commuting",
                 "single_query", "protocol", "seed", "notes"],
    "properties": {
        "task": _TASK,
        "support_hash": _HASH,
        "n_qubits": {"type": "integer", "minimum": 1},
        "n_terms": {"type": "integer", "minimum": 1},
        "pairwise_commuting": {"type": "boolean"},
        "single_query": {
            "type": "object",
            "required": ["invert", "conjugate", "transpose"],
            "properties": {"invert": _SINGLE, "conjugate": _SINGLE, "transpose": _SINGLE},
            "additionalProperties": False,
        },
        "protocol": {
            "type": "object",
            "required": ["status", "route", "query_count", "certificate", "program", "validation_min_fidelity"],
            "properties": {
                "status": {"enum": ["found", "not_found", "cap_exceeded", "unsupported"]},
                "route": {"enum": [None, "single_query", "commuting_cover", "split", "commuting_twisted"]},
                "query_count": {"type": ["integer", "null"], "minimum": 1},
                "certificate": {"type": "object"},
                "program": {"type": ["array", "null"], "items": {"type": "string", "pattern": "^(QUERY|GATE .+)$"}},
                "validation_min_fidelity": {"oneOf": [_NUM01, {"type": "null"}]},
            },
        },
        "seed": _SEED,
        "notes": {"type": "array", "items": {"type": "string"}},
        "circuit_file": {"type": "string"},
    },
    "additionalProperties": False,
}

VERIFICATION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "verification report",
    "type": "object",
    "required": ["task", "support_hash", "samples", "seed", "tol", "query_count",
                 "min_fidelity", "mean_fidelity", "verdict"],
    "properties": {
        "task": _TASK,
        "support_hash": _HASH,
        "samples": {"type": "integer", "minimum": 1},
        "seed": _SEED,
        "tol": {"type": "number", "minimum": 0},
        "query_count": {"type": "integer", "minimum": 1},
        "min_fidelity": _NUM01,
        "mean_fidelity": _NUM01,
        "verdict": {"enum": ["pass", "fail"]},
        "per_sample": {"type": "array", "items": _NUM01},
    },
    "additionalProperties": False,
}

ROBUSTNESS_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "robustness table",
    "type": "object",
    "required": ["task", "support_hash", "samples", "seed", "query_count", "table"],
    "properties": {
        "task": _TASK,
        "support_hash": _HASH,
        "samples": {"type": "integer", "minimum": 1},
        "seed": _SEED,
        "query_count": {"type": "integer", "minimum": 1},
        "table": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["delta", "mean_fidelity", "min_fidelity", "std_fidelity"],
                "properties": {
                    "delta": {"type": "number", "minimum": 0},
                    "mean_fidelity": _NUM01,
                    "min_fidelity": _NUM01,
                    "std_fidelity": {"type": "number", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}

ORACLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "oracle report",
    "type": "object",
    "required": ["task", "support_hash", "obstruction_found", "single_query", "witness", "seed"],
    "properties": {
        "task": _TASK,
        "support_hash": _HASH,
        "obstruction_found": {"type": "boolean"},
        "single_query": {"enum": ["possible", "impossible"]},
        "witness": {"type": ["array", "null"], "items": {"type": "string"}},
        "seed": _SEED,
    },
    "additionalProperties": False,
}
