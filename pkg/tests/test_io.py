import json
import math

import numpy as np
import pytest

from qcs_gauss import channels, core, io, states
from qcs_gauss.io import DocumentError, build_state


def same_terms(a, b):
    return (
        np.array_equal(a.log_coeffs, b.log_coeffs)
        and np.array_equal(a.means, b.means)
        and np.array_equal(a.covs, b.covs)
    )


BUILT_IN_DOCS = [
    {"type": "vacuum"},
    {"type": "vacuum", "n_modes": 2},
    {"type": "coherent", "alpha": [1.0, -0.5]},
    {"type": "coherent", "alpha": [[1.0, 0.0], [0.0, 2.0]]},
    {"type": "squeezed", "r": 0.8},
    {"type": "cat", "alpha": 2.0},
    {"type": "cat", "alpha": [1.2, 0.7]},
    {"type": "gkp", "epsilon": 0.3, "a0": 0.6, "a1": [0.0, 0.8]},
    {"type": "breed", "r": 1.2, "rounds": 2, "protocol": "efficient"},
    {"type": "breed", "alpha": 4.0, "r": 0.3, "rounds": 1, "recenter": False},
    {"type": "cat", "alpha": 1.5, "channels": [{"type": "loss", "eta": 0.7}, {"type": "rotation", "theta": 0.4}]},
]


@pytest.mark.parametrize("doc", BUILT_IN_DOCS, ids=lambda d: d["type"])
def test_round_trip_is_exact(doc):
    state = build_state(doc)
    text = io.dumps(state)
    rebuilt = build_state(io.loads(text))
    assert same_terms(state, rebuilt)


def test_documents_match_constructors():
    assert same_terms(build_state({"type": "cat", "alpha": 2}), states.cat(2.0))
    assert same_terms(build_state({"schema": 1, "type": "gkp", "epsilon": 0.2}), states.gkp(0.2))
    assert same_terms(build_state({"type": "coherent", "alpha": [0.0, 1.0]}), states.coherent(1j))
    lossy = build_state({"type": "cat", "alpha": 2, "channels": [{"type": "loss", "eta": 0.5}]})
    assert same_terms(lossy, channels.loss(0.5)(states.cat(2.0)))


def test_channel_chain_order():
    doc = {
        "type": "coherent",
        "alpha": 1.0,
        "channels": [{"type": "displacement", "d": [1.0, 0.0]}, {"type": "rotation", "theta": math.pi / 2}],
    }
    mean, _ = core.moments(build_state(doc))
    np.testing.assert_allclose(mean, [0, math.sqrt(2) + 1], atol=1e-14)


def test_squeezing_channel_on_second_mode():
    doc = {"type": "vacuum", "n_modes": 2, "channels": [{"type": "squeezing", "r": 0.5, "mode": 1}]}
    cov = build_state(doc).covs[0].real
    np.testing.assert_allclose(np.diag(cov), [0.5, 0.5, math.exp(-1) / 2, math.exp(1) / 2])


def test_custom_terms_with_plain_coefficients():
    doc = {
        "type": "custom",
        "terms": [{"coeff": 1.0, "mean": [0.0, 0.0], "cov": [[0.5, 0.0], [0.0, 0.5]]}],
    }
    assert same_terms(build_state(doc), states.vacuum())


@pytest.mark.parametrize(
    "doc",
    [
        {"type": "cat", "alpha": 2, "beta": 1},
        {"type": "qubit"},
        {"type": "cat"},
        {"type": "gkp", "epsilon": 0.2, "channels": [{"type": "loss", "eta": 0.5, "extra": 1}]},
        {"type": "cat", "alpha": 1, "channels": [{"type": "teleport"}]},
        {"type": "cat", "alpha": 1, "channels": [{"type": "loss", "eta": 1.5}]},
        {"type": "cat", "alpha": 1, "channels": {"type": "loss", "eta": 0.5}},
        {"type": "cat", "alpha": "two"},
        {"type": "squeezed", "r": [0.1, 0.2]},
        {"type": "breed", "r": 0.1, "protocol": "fast"},
        {"type": "cat", "alpha": 1, "schema": 2},
        {"type": "custom", "terms": []},
        {"type": "custom", "terms": [{"coeff": 1.0, "log_coeff": 0.0, "mean": [0, 0], "cov": [[1, 0], [0, 1]]}]},
        {"type": "custom", "terms": [{"coeff": 1.0, "mean": [0, 0, 0], "cov": [[1, 0], [0, 1]]}]},
        {"type": "custom", "terms": [{"coeff": 1.0, "cov": [[1, 0], [0, 1]]}]},
        ["not", "an", "object"],
    ],
)
def test_invalid_documents_are_rejected(doc):
    with pytest.raises(DocumentError):
        build_state(doc)


def test_malformed_json():
    with pytest.raises(DocumentError):
        io.loads("{nope")


def test_missing_file(tmp_path):
    with pytest.raises(DocumentError):
        io.load_document(tmp_path / "absent.json")


def test_with_parameter_targets_first_loss():
    doc = {"type": "cat", "alpha": 2, "channels": [{"type": "rotation", "theta": 0.1}, {"type": "loss", "eta": 0.9}]}
    out = io.with_parameter(doc, "eta", 0.5)
    assert out["channels"][1]["eta"] == 0.5
    assert doc["channels"][1]["eta"] == 0.9
    appended = io.with_parameter({"type": "cat", "alpha": 2}, "eta", 0.7)
    assert appended["channels"] == [{"type": "loss", "eta": 0.7}]


def test_with_parameter_top_level_fields():
    assert io.with_parameter({"type": "gkp", "epsilon": 0.1}, "epsilon", 0.4)["epsilon"] == 0.4
    assert io.with_parameter({"type": "breed", "r": 0.1}, "alpha", 3.0)["alpha"] == 3.0
    with pytest.raises(DocumentError):
        io.with_parameter({"type": "cat", "alpha": 1}, "epsilon", 0.3)


def test_document_is_plain_json():
    doc = io.state_to_document(states.cat(1.0 + 0.5j))
    assert json.loads(json.dumps(doc)) == doc
    assert doc["type"] == "custom" and len(doc["terms"]) == 4
