"""Canonical JSON for all file artifacts.

Every artifact (tensor, report, witness, certificate) serializes through
canonical_dumps: sorted keys, no whitespace, trailing newline on disk.
Loading a saved file and saving it again reproduces the bytes exactly,
which is what lets tests pin artifacts by content.
"""

from __future__ import annotations

import json


def canonical_dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def save_json(path, obj):
    """Write canonical JSON plus a trailing newline; returns the text written."""
    text = canonical_dumps(obj) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return text


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
