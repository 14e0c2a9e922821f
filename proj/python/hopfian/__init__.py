"""Symbolic classifier for strong Hopficity of abelian groups."""

import json as _json

from ._core import (
    chain_index,
    classify_text,
    min_uniform_exponent,
    roundtrip_text,
    snf,
)

__all__ = [
    "chain_index",
    "classify",
    "classify_file",
    "classify_text",
    "min_uniform_exponent",
    "roundtrip_text",
    "snf",
]


def classify(document, with_oracle=False):
    """Classify a descriptor document (dict or JSON text); returns the report dict."""
    text = _json.dumps(document) if isinstance(document, dict) else document
    return _json.loads(classify_text(text, with_oracle))


def classify_file(path, with_oracle=False):
    with open(path, encoding="utf-8") as f:
        return classify(f.read(), with_oracle)
