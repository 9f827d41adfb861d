"""Wire format: golden frames, strict validation, schema agreement."""

import json
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchteleop.service.protocol import (
    ALL_MESSAGE_TYPES,
    CLIENT_MESSAGE_TYPES,
    PROTOCOL_VERSION,
    SERVER_MESSAGE_TYPES,
    MalformedMessage,
    Message,
    UnknownType,
    decode_message,
    encode_message,
)

GOLDEN_DIR = Path(__file__).parent / "golden"
SCHEMA = json.loads(
    (Path(__file__).parent.parent / "src/sketchteleop/service/protocol_schema.json").read_text()
)
VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def golden_path(name: str) -> Path:
    return GOLDEN_DIR / f"{name}.json"


class TestGoldenFixtures:
    def test_every_type_has_a_fixture(self):
        found = {p.stem for p in GOLDEN_DIR.glob("*.json")}
        assert found == set(ALL_MESSAGE_TYPES)

    @pytest.mark.parametrize("name", sorted(ALL_MESSAGE_TYPES))
    def test_decode_encode_reproduces_bytes(self, name):
        wire = golden_path(name).read_text().rstrip("\n")
        msg = decode_message(wire)
        assert msg.type == name
        assert encode_message(msg) == wire

    @pytest.mark.parametrize("name", sorted(ALL_MESSAGE_TYPES))
    def test_fixture_passes_json_schema(self, name):
        data = json.loads(golden_path(name).read_text())
        VALIDATOR.validate(data)

    @pytest.mark.parametrize("name", sorted(ALL_MESSAGE_TYPES))
    def test_fixture_matches_doc(self, name):
        """The frames quoted in docs/protocol.md are the fixtures, bit for bit."""
        doc = (Path(__file__).parent.parent / "docs/protocol.md").read_text()
        wire = golden_path(name).read_text().rstrip("\n")
        assert wire in doc


class TestEnvelope:
    def test_exactly_three_fields(self):
        wire = '{"type":"confirm","seq":1,"payload":{"accept":true},"extra":1}'
        with pytest.raises(MalformedMessage):
            decode_message(wire)

    def test_not_json(self):
        with pytest.raises(MalformedMessage):
            decode_message("{nope")

    def test_non_object_frame(self):
        with pytest.raises(MalformedMessage):
            decode_message("[1, 2]")

    @pytest.mark.parametrize("seq", [-1, 1.5, "3", True, None])
    def test_bad_seq_rejected(self, seq):
        wire = json.dumps({"type": "confirm", "seq": seq, "payload": {"accept": True}})
        with pytest.raises(MalformedMessage):
            decode_message(wire)

    def test_unknown_type_is_its_own_error(self):
        wire = json.dumps({"type": "telemetry", "seq": 0, "payload": {}})
        with pytest.raises(UnknownType):
            decode_message(wire)

    def test_missing_payload(self):
        with pytest.raises(MalformedMessage):
            decode_message('{"type":"grasp","seq":0}')

    def test_type_must_be_string(self):
        with pytest.raises(MalformedMessage):
            decode_message('{"type":7,"seq":0,"payload":{}}')

    def test_direction_sets_cover_all_types(self):
        assert CLIENT_MESSAGE_TYPES | SERVER_MESSAGE_TYPES == ALL_MESSAGE_TYPES
        assert not CLIENT_MESSAGE_TYPES & SERVER_MESSAGE_TYPES
        assert len(ALL_MESSAGE_TYPES) == 12


class TestPayloadValidation:
    def test_extra_payload_field_rejected(self):
        wire = json.dumps(
            {"type": "confirm", "seq": 0, "payload": {"accept": True, "why": "x"}}
        )
        with pytest.raises(MalformedMessage):
            decode_message(wire)

    def test_missing_required_field(self):
        wire = json.dumps({"type": "joystick", "seq": 0, "payload": {"left_y": 0.0}})
        with pytest.raises(MalformedMessage):
            decode_message(wire)

    def test_bool_is_not_a_number(self):
        payload = {"left_y": True, "right_x": 0.0, "right_y": 0.0, "done": False}
        with pytest.raises(MalformedMessage):
            decode_message(json.dumps({"type": "joystick", "seq": 0, "payload": payload}))

    def test_hello_pins_protocol_version(self):
        payload = {
            "protocol_version": PROTOCOL_VERSION + 1,
            "session_id": "x",
            "observation_hz": "2.000",
            "tick_hz": "20.000",
        }
        with pytest.raises(MalformedMessage):
            decode_message(json.dumps({"type": "hello", "seq": 0, "payload": payload}))

    @pytest.mark.parametrize("rate", ["2", "2.0", "2.0000", " 2.000", "a.000"])
    def test_rates_are_three_decimal_strings(self, rate):
        payload = {
            "protocol_version": PROTOCOL_VERSION,
            "session_id": "x",
            "observation_hz": rate,
            "tick_hz": "20.000",
        }
        with pytest.raises(MalformedMessage):
            decode_message(json.dumps({"type": "hello", "seq": 0, "payload": payload}))

    def test_constraint_sentence_is_closed_vocabulary(self):
        wire = json.loads(golden_path("task_result").read_text())
        wire["payload"]["constraint"] = "The robot might be holding an object."
        with pytest.raises(MalformedMessage):
            decode_message(json.dumps(wire))

    def test_strokes_reject_flat_lists(self):
        payload = {"frame_id": "f", "strokes": [[1.0, 2.0]]}
        with pytest.raises(MalformedMessage):
            decode_message(json.dumps({"type": "sketch_submit", "seq": 0, "payload": payload}))

    def test_strokes_accept_two_and_three_part_points(self):
        payload = {"frame_id": "f", "strokes": [[[1.0, 2.0], [3.0, 4.0, 0.1]]]}
        msg = decode_message(json.dumps({"type": "sketch_submit", "seq": 0, "payload": payload}))
        assert msg.payload["frame_id"] == "f"

    def test_empty_payload_types(self):
        for name in ("grasp", "release"):
            msg = decode_message(json.dumps({"type": name, "seq": 3, "payload": {}}))
            assert msg.payload == {}
            with pytest.raises(MalformedMessage):
                decode_message(json.dumps({"type": name, "seq": 3, "payload": {"x": 1}}))

    def test_encode_refuses_invalid(self):
        with pytest.raises(MalformedMessage):
            encode_message(Message(seq=0, type="confirm", payload={}))
        with pytest.raises(ValueError):
            encode_message(Message(seq=0, type="nope", payload={}))


class TestSchemaAgreement:
    """The hand-rolled validator and the JSON Schema accept the same frames.

    One direction is load-bearing: anything the runtime accepts must
    validate, so a schema-driven client never chokes on real traffic.
    """

    @staticmethod
    def _mutations():
        cases = []
        for path in sorted(GOLDEN_DIR.glob("*.json")):
            base = json.loads(path.read_text())
            cases.append(base)
            # field dropped
            for key in list(base["payload"]):
                m = json.loads(json.dumps(base))
                del m["payload"][key]
                cases.append(m)
            # field added
            m = json.loads(json.dumps(base))
            m["payload"]["surplus"] = 1
            cases.append(m)
            # envelope extras and bad seq
            m = json.loads(json.dumps(base))
            m["channel"] = 2
            cases.append(m)
            m = json.loads(json.dumps(base))
            m["seq"] = -4
            cases.append(m)
        return cases

    def test_runtime_and_schema_agree_on_mutations(self):
        for case in self._mutations():
            wire = json.dumps(case)
            try:
                decode_message(wire)
                runtime_ok = True
            except (MalformedMessage, UnknownType):
                runtime_ok = False
            schema_ok = VALIDATOR.is_valid(case)
            if runtime_ok:
                assert schema_ok, f"runtime accepted but schema rejected: {wire[:120]}"
            else:
                assert not schema_ok, f"schema accepted but runtime rejected: {wire[:120]}"

    @settings(max_examples=300, deadline=None)
    @given(
        data=st.dictionaries(
            st.sampled_from(["type", "seq", "payload", "v", "id"]),
            st.one_of(
                st.sampled_from(sorted(ALL_MESSAGE_TYPES)),
                st.integers(-3, 3),
                st.dictionaries(
                    st.sampled_from(["accept", "done", "left_y", "right_x", "right_y", "code"]),
                    st.one_of(st.booleans(), st.floats(allow_nan=False), st.text(max_size=4)),
                    max_size=4,
                ),
            ),
            max_size=4,
        )
    )
    def test_runtime_acceptance_implies_schema_validity(self, data):
        try:
            decode_message(json.dumps(data))
        except (MalformedMessage, UnknownType):
            return
        assert VALIDATOR.is_valid(data)
