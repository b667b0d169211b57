"""Small shared helpers: canonical JSON and stable hashing for ids/seeds."""

import hashlib
import json


def canonical_json(obj):
    """Deterministic JSON text: sorted keys, no whitespace, shortest
    round-trip float representation."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def stable_digest(*parts):
    h = hashlib.blake2b(digest_size=16)
    for part in parts:
        if not isinstance(part, str):
            part = canonical_json(part)
        h.update(part.encode("utf-8"))
        h.update(b"\x1f")
    return h.hexdigest()


def derive_seed(*parts):
    """Deterministic 63-bit seed from arbitrary jsonable parts."""
    return int(stable_digest(*parts)[:15], 16)


def pipeline_id(algorithm, config):
    """Content-addressed pipeline identifier."""
    return "pl-" + stable_digest(algorithm, config)[:12]
