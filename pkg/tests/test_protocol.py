import json
import math
import random

import pytest

from toxbench.dataset import ENDPOINTS
from toxbench.protocol import (
    PredictRequest,
    PredictResponse,
    WireFormatError,
    decode_request,
    decode_response,
    encode_request,
    encode_response,
    validate_response,
)

EXAMPLE_REQUEST = '{"smiles": ["CCO", "c1ccccc1"]}'

# wire example: nested predictions map with model metadata
EXAMPLE_VALUES = {
    "NR-AhR": 0.005747087765485048,
    "NR-AR": 0.001738760736770928,
    "NR-AR-LBD": 0.00021425147133413702,
    "SR-p53": 0.0007309493375942111,
}


def full_endpoint_map(base: dict) -> dict:
    out = {e: 0.25 for e in ENDPOINTS}
    out.update(base)
    return out


def example_response_text() -> str:
    doc = {
        "predictions": {
            "CCO": full_endpoint_map(EXAMPLE_VALUES),
            "c1ccccc1": full_endpoint_map({}),
        },
        "model_info": {"name": "Tox21 GIN classifier", "version": "1.0.0"},
    }
    return json.dumps(doc)


class TestRequestCodec:
    def test_example_decodes(self):
        req = decode_request(EXAMPLE_REQUEST)
        assert req.smiles == ("CCO", "c1ccccc1")

    def test_canonical_idempotence(self):
        blob = encode_request(decode_request(EXAMPLE_REQUEST))
        assert encode_request(decode_request(blob)) == blob

    def test_duplicates_forbidden(self):
        with pytest.raises(WireFormatError):
            decode_request('{"smiles": ["CCO", "CCO"]}')
        with pytest.raises(ValueError):
            PredictRequest(("CCO", "CCO"))

    def test_structural_errors_carry_paths(self):
        cases = [
            ("[]", "$"),
            ("{}", "$"),
            ('{"smiles": []}', "$.smiles"),
            ('{"smiles": [""]}', "$.smiles[0]"),
            ('{"smiles": [5]}', "$.smiles[0]"),
            ('{"smiles": ["C"], "extra": 1}', "$"),
        ]
        for text, path in cases:
            with pytest.raises(WireFormatError) as err:
                decode_request(text)
            assert err.value.path == path


class TestResponseCodec:
    def test_example_values_survive(self):
        resp = decode_response(example_response_text())
        assert resp.predictions["CCO"]["NR-AhR"] == pytest.approx(
            0.005747087765485048, abs=0)
        assert resp.model_info["name"] == "Tox21 GIN classifier"

    def test_round_trip_preserves_floats(self):
        resp = decode_response(example_response_text())
        again = decode_response(encode_response(resp))
        assert again.predictions["CCO"]["NR-AhR"] == resp.predictions["CCO"]["NR-AhR"]

    def test_canonical_idempotence(self):
        blob = encode_response(decode_response(example_response_text()))
        assert encode_response(decode_response(blob)) == blob

    def test_missing_model_info(self):
        with pytest.raises(WireFormatError) as err:
            decode_response('{"predictions": {}}')
        assert "model_info" in str(err.value)

    def test_key_order_and_whitespace_insensitive(self):
        text = example_response_text()
        doc = json.loads(text)
        reordered = json.dumps(doc, sort_keys=True, indent=3)
        assert decode_response(reordered).predictions == decode_response(text).predictions

    def test_nan_decodes_then_flagged(self):
        # structural decode lets NaN through; validation reports it
        text = example_response_text().replace("0.005747087765485048", "NaN")
        resp = decode_response(text)
        assert math.isnan(resp.predictions["CCO"]["NR-AhR"])


class TestDecodeFuzz:
    def test_random_bytes_never_crash(self):
        rng = random.Random(0)
        for _ in range(2000):
            blob = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 40)))
            try:
                decode_response(blob)
            except WireFormatError as exc:
                assert exc.path

    def test_mutated_json_never_crashes(self):
        rng = random.Random(1)
        text = example_response_text()
        for _ in range(500):
            pos = rng.randrange(len(text))
            mutated = text[:pos] + rng.choice('{}[]",:0.eXn') + text[pos + 1:]
            try:
                decode_response(mutated)
            except WireFormatError as exc:
                assert exc.path


class TestValidation:
    def request(self):
        return PredictRequest(("CCO", "c1ccccc1"))

    def response(self, edits=()):
        doc = {
            "CCO": full_endpoint_map({}),
            "c1ccccc1": full_endpoint_map({}),
        }
        for (smiles, endpoint), value in dict(edits).items():
            if value is None:
                del doc[smiles][endpoint]
            else:
                doc[smiles][endpoint] = value
        return PredictResponse(predictions=doc, model_info={"name": "m", "version": "1"})

    def test_clean(self):
        report = validate_response(self.request(), self.response())
        assert report.ok
        assert report.violations == ()

    def test_missing_target(self):
        report = validate_response(self.request(),
                                   self.response({("CCO", "SR-p53"): None}))
        assert report.kinds() == ["missing_target"]
        violation = report.violations[0]
        assert violation.smiles == "CCO" and violation.endpoint == "SR-p53"

    def test_missing_molecule(self):
        resp = self.response()
        del resp.predictions["c1ccccc1"]
        report = validate_response(self.request(), resp)
        assert report.kinds() == ["missing_molecule"]

    def test_nan_rejected(self):
        report = validate_response(self.request(),
                                   self.response({("CCO", "NR-AR"): float("nan")}))
        assert report.kinds() == ["non_finite"]

    def test_out_of_range(self):
        report = validate_response(self.request(),
                                   self.response({("CCO", "NR-AR"): 1.2}))
        assert report.kinds() == ["out_of_range"]

    def test_extra_keys(self):
        resp = self.response()
        resp.predictions["CCO"]["NR-BOGUS"] = 0.5
        resp.predictions["unrequested"] = full_endpoint_map({})
        report = validate_response(self.request(), resp)
        assert sorted(report.kinds()) == ["extra_key", "extra_key"]

    def test_every_violation_listed(self):
        resp = self.response({("CCO", "NR-AR"): 2.0,
                              ("CCO", "SR-p53"): float("inf"),
                              ("c1ccccc1", "NR-ER"): None})
        report = validate_response(self.request(), resp)
        assert sorted(report.kinds()) == ["missing_target", "non_finite", "out_of_range"]

    def test_malformed_value(self):
        resp = self.response()
        resp.predictions["CCO"]["NR-AR"] = "high"
        report = validate_response(self.request(), resp)
        assert "malformed" in report.kinds()
