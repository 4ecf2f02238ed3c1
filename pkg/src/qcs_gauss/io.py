"""JSON state documents.

A document names one constructor plus an optional ordered chain of
channels, for example::

    {"schema": 1, "type": "cat", "alpha": 2.0,
     "channels": [{"type": "loss", "eta": 0.5}]}

Complex numbers are written either as plain numbers or as ``[re, im]``.
Any state can be written out as a ``"custom"`` document listing its terms;
reading it back reproduces the term arrays exactly.
"""

import json

import numpy as np

from . import channels as ch
from . import states
from .core import GaussianSumState

SCHEMA_VERSION = 1


class DocumentError(ValueError):
    """A state document could not be parsed."""


STATE_FIELDS = {
    "vacuum": {"n_modes"},
    "coherent": {"alpha"},
    "squeezed": {"r"},
    "cat": {"alpha"},
    "gkp": {"epsilon", "a0", "a1", "cutoff"},
    "breed": {"alpha", "r", "rounds", "protocol", "recenter"},
    "custom": {"terms"},
}
REQUIRED_FIELDS = {
    "coherent": {"alpha"},
    "squeezed": {"r"},
    "cat": {"alpha"},
    "gkp": {"epsilon"},
    "custom": {"terms"},
}
CHANNEL_FIELDS = {
    "loss": {"eta"},
    "displacement": {"d"},
    "rotation": {"theta", "mode"},
    "squeezing": {"r", "mode"},
}
COMMON_FIELDS = {"schema", "type", "channels"}


def parse_complex(value):
    if isinstance(value, bool):
        raise DocumentError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = value
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            return complex(re, im)
    raise DocumentError(f"expected a number or [re, im], got {value!r}")


def encode_complex(z):
    z = complex(z)
    return [z.real, z.imag]


def _real(doc, key, default=None):
    if key not in doc:
        return default
    value = parse_complex(doc[key])
    if value.imag:
        raise DocumentError(f"{key} must be real")
    return value.real


def _check_fields(doc, allowed, what):
    unknown = set(doc) - allowed
    if unknown:
        raise DocumentError(f"unknown field(s) for {what}: {', '.join(sorted(unknown))}")


def _parse_terms(raw):
    if not isinstance(raw, list) or not raw:
        raise DocumentError("custom state needs a non-empty list of terms")
    log_coeffs, means, covs = [], [], []
    for i, term in enumerate(raw):
        if not isinstance(term, dict):
            raise DocumentError(f"term {i} must be an object")
        _check_fields(term, {"coeff", "log_coeff", "mean", "cov"}, f"term {i}")
        if ("coeff" in term) == ("log_coeff" in term):
            raise DocumentError(f"term {i} needs exactly one of coeff / log_coeff")
        if "log_coeff" in term:
            log_coeffs.append(parse_complex(term["log_coeff"]))
        else:
            c = parse_complex(term["coeff"])
            log_coeffs.append(complex(np.log(c)) if c != 0 else complex(-np.inf))
        try:
            means.append([parse_complex(v) for v in term["mean"]])
            covs.append([[parse_complex(v) for v in row] for row in term["cov"]])
        except (KeyError, TypeError) as exc:
            raise DocumentError(f"term {i} needs mean and cov arrays") from exc
    try:
        return GaussianSumState(log_coeffs, np.array(means), np.array(covs))
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


def _build_base(doc):
    kind = doc.get("type")
    if kind not in STATE_FIELDS:
        raise DocumentError(f"unknown state type {kind!r}")
    _check_fields(doc, STATE_FIELDS[kind] | COMMON_FIELDS, f"state type {kind!r}")
    missing = REQUIRED_FIELDS.get(kind, set()) - set(doc)
    if missing:
        raise DocumentError(f"state type {kind!r} needs field(s): {', '.join(sorted(missing))}")
    if kind == "vacuum":
        return states.vacuum(int(doc.get("n_modes", 1)))
    if kind == "coherent":
        alpha = doc["alpha"]
        if isinstance(alpha, list) and alpha and isinstance(alpha[0], list):
            return states.coherent([parse_complex(a) for a in alpha])
        return states.coherent(parse_complex(alpha))
    if kind == "squeezed":
        return states.squeezed_vacuum(_real(doc, "r"))
    if kind == "cat":
        return states.cat(parse_complex(doc["alpha"]))
    if kind == "gkp":
        cutoff = doc.get("cutoff")
        return states.gkp(
            _real(doc, "epsilon"),
            parse_complex(doc.get("a0", 1.0)),
            parse_complex(doc.get("a1", 0.0)),
            None if cutoff is None else int(cutoff),
        )
    if kind == "breed":
        protocol = doc.get("protocol", "slow")
        if protocol not in ("slow", "efficient"):
            raise DocumentError(f"unknown breeding protocol {protocol!r}")
        return states.breed(
            _real(doc, "alpha"),
            _real(doc, "r", 0.0),
            int(doc.get("rounds", 0)),
            protocol,
            bool(doc.get("recenter", True)),
        )
    return _parse_terms(doc["terms"])


def build_channel(doc, n_modes=1):
    if not isinstance(doc, dict):
        raise DocumentError("each channel must be an object")
    kind = doc.get("type")
    if kind not in CHANNEL_FIELDS:
        raise DocumentError(f"unknown channel type {kind!r}")
    _check_fields(doc, CHANNEL_FIELDS[kind] | {"type"}, f"channel {kind!r}")
    try:
        if kind == "loss":
            return ch.loss(_real(doc, "eta"), n_modes)
        if kind == "displacement":
            return ch.displacement([_real({"v": v}, "v") for v in doc["d"]])
        mode = int(doc.get("mode", 0))
        if kind == "rotation":
            return ch.rotation(_real(doc, "theta"), mode, n_modes)
        return ch.squeezing(_real(doc, "r"), mode, n_modes)
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"channel {kind!r} is missing a parameter") from exc
    except ValueError as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc)) from exc


def build_state(doc):
    """Construct the state described by a document, channels applied in order."""
    if not isinstance(doc, dict):
        raise DocumentError("a state document must be a JSON object")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema version {schema!r}")
    state = _build_base(doc)
    chain = doc.get("channels", [])
    if not isinstance(chain, list):
        raise DocumentError("channels must be a list")
    for entry in chain:
        state = ch.apply(build_channel(entry, state.n_modes), state)
    return state


def state_to_document(state):
    """Lossless ``"custom"`` document for any state."""
    terms = [
        {
            "log_coeff": encode_complex(lc),
            "mean": [encode_complex(v) for v in mu],
            "cov": [[encode_complex(v) for v in row] for row in cov],
        }
        for lc, mu, cov in zip(state.log_coeffs, state.means, state.covs)
    ]
    return {"schema": SCHEMA_VERSION, "type": "custom", "terms": terms}


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc}") from exc


def load_document(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def dumps(state):
    return json.dumps(state_to_document(state))


def with_parameter(doc, name, value):
    """Copy of ``doc`` with one sweep axis set.

    ``eta`` targets the first loss channel, appending one if the chain has
    none; every other axis is a top-level field of the state type.
    """
    doc = json.loads(json.dumps(doc))
    if name == "eta":
        chain = doc.setdefault("channels", [])
        for entry in chain:
            if isinstance(entry, dict) and entry.get("type") == "loss":
                entry["eta"] = value
                break
        else:
            chain.append({"type": "loss", "eta": value})
        return doc
    kind = doc.get("type")
    if name not in STATE_FIELDS.get(kind, set()):
        raise DocumentError(f"state type {kind!r} has no parameter {name!r}")
    doc[name] = value
    return doc
