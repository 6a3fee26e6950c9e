"""JSON schemas of every document the command line writes."""

from __future__ import annotations

import jsonschema

SCHEMA_VERSION = "1.0"

_num_or_null = {"type": ["number", "null"]}

_header = {
    "schema_version": {"const": SCHEMA_VERSION},
    "kind": {"type": "string"},
    "config": {"type": "object"},
}

CENSUS = {
    "type": "object",
    "required": ["schema_version", "kind", "model", "dim", "N", "rule", "total_walks", "num_matrices", "classes"],
    "properties": {
        **_header,
        "kind": {"const": "census"},
        "model": {"enum": ["srw", "saw", "baw"]},
        "dim": {"type": "integer", "minimum": 1},
        "N": {"type": "integer", "minimum": 0},
        "rule": {"type": "string"},
        "conventional_rule": {"type": "boolean"},
        "total_walks": {"type": "integer", "minimum": 1},
        "num_matrices": {"type": "integer", "minimum": 1},
        "classes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["key_hex", "degeneracy", "range"],
                "properties": {
                    "key_hex": {"type": "string", "pattern": "^[0-9a-f]*$"},
                    "degeneracy": {"type": "integer", "minimum": 1},
                    "range": {"type": "integer", "minimum": 1},
                },
                "additionalProperties": False,
            },
        },
    },
}

ENTROPY = {
    "type": "object",
    "required": ["schema_version", "kind", "config", "census", "report"],
    "properties": {
        **_header,
        "kind": {"const": "entropy"},
        "census": {"type": "object", "required": ["model", "dim", "N", "rule", "total_walks", "num_matrices"]},
        "report": {
            "type": "object",
            "required": ["S", "S_C", "S_hat_C", "S_hat_C_direct", "S_hat_C_discrepancy", "S_bar_C",
                         "delta", "gamma", "mean_log_deg", "jensen_lower", "degenerate"],
            "properties": {
                "S": {"type": "number"},
                "S_C": {"type": "number"},
                "delta": _num_or_null,
                "gamma": _num_or_null,
                "jensen_lower": _num_or_null,
                "degenerate": {"type": "boolean"},
            },
        },
    },
}

PREIMAGE = {
    "type": "object",
    "required": ["schema_version", "kind", "config", "matrix", "feasible", "count", "walks"],
    "properties": {
        **_header,
        "kind": {"const": "preimage"},
        "matrix": {"type": "string"},
        "feasible": {"type": "boolean"},
        "count": {"type": "integer", "minimum": 0},
        "walks": {"type": "array", "items": {"type": "string"}},
    },
}

ESTIMATE = {
    "type": "object",
    "required": ["schema_version", "kind", "config", "mean", "stderr", "n_samples", "seed", "N", "metadata"],
    "properties": {
        **_header,
        "kind": {"const": "estimate"},
        "mean": {"type": "number"},
        "stderr": {"type": "number", "minimum": 0},
        "n_samples": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer"},
        "N": {"type": "integer"},
        "metadata": {"type": "object", "required": ["estimator"]},
    },
}

CHECK = {
    "type": "object",
    "required": ["schema_version", "kind", "config", "ok", "results"],
    "properties": {
        **_header,
        "kind": {"const": "check"},
        "ok": {"type": "boolean"},
        "results": {"type": "object"},
    },
}

SCHEMAS = {"census": CENSUS, "entropy": ENTROPY, "preimage": PREIMAGE, "estimate": ESTIMATE, "check": CHECK}


def validate_document(doc: dict) -> None:
    """Raise ``jsonschema.ValidationError`` unless ``doc`` matches the schema of its kind."""
    try:
        schema = SCHEMAS[doc["kind"]]
    except KeyError:
        raise jsonschema.ValidationError(f"unknown document kind {doc.get('kind')!r}") from None
    jsonschema.validate(doc, schema)
