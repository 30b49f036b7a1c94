import gzip
import hashlib
import io
import json
import string
import tracemalloc

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kcqa import Dataset, QAInstance, parse_mrqa, validate_instance, write_mrqa
from kcqa.errors import ParseError, SchemaError, ValidationError
from kcqa.mrqa import MrqaReader

from conftest import WW1_CONTEXT, WW1_QUESTION, make_instance


def mrqa_bytes(*lines: dict) -> bytes:
    return b"".join(json.dumps(line).encode() + b"\n" for line in lines)


def ww1_file_bytes() -> bytes:
    start = WW1_CONTEXT.index("Germany")
    return mrqa_bytes(
        {"header": {"dataset": "fixture"}},
        {
            "context": WW1_CONTEXT,
            "qas": [
                {
                    "qid": "q1",
                    "question": WW1_QUESTION,
                    "answers": ["Germany"],
                    "detected_answers": [
                        {"text": "Germany", "char_spans": [[start, start + 6]]}
                    ],
                }
            ],
        },
    )


class TestParse:
    def test_single_instance(self):
        ds = parse_mrqa(io.BytesIO(ww1_file_bytes()))
        assert len(ds) == 1
        inst = ds.instances[0]
        assert inst.qid == "q1"
        assert inst.question == WW1_QUESTION
        assert inst.gold_answers == ("Germany",)
        start, end = inst.answer_spans[0]
        assert inst.context[start:end] == "Germany"

    def test_header_only(self):
        ds = parse_mrqa(io.BytesIO(mrqa_bytes({"header": {"dataset": "x"}})))
        assert ds.header == {"dataset": "x"}
        assert len(ds) == 0

    def test_empty_answers_rejected(self):
        data = mrqa_bytes(
            {"header": {}},
            {"context": "abc", "qas": [{"qid": "q1", "question": "?", "answers": [],
                                        "detected_answers": []}]},
        )
        with pytest.raises(SchemaError, match="gold_answers empty"):
            parse_mrqa(io.BytesIO(data))

    def test_malformed_json_names_line(self):
        data = b'{"header": {}}\n{"context": broken\n'
        with pytest.raises(ParseError, match="line 2"):
            parse_mrqa(io.BytesIO(data))

    def test_missing_header(self):
        with pytest.raises(SchemaError, match="header"):
            parse_mrqa(io.BytesIO(b'{"context": "x", "qas": []}\n'))

    def test_missing_field_names_field_and_qid(self):
        data = mrqa_bytes(
            {"header": {}},
            {"context": "abc", "qas": [{"qid": "q7", "answers": ["a"],
                                        "detected_answers": []}]},
        )
        with pytest.raises(SchemaError, match=r"question.*q7"):
            parse_mrqa(io.BytesIO(data))

    def test_span_out_of_bounds(self):
        data = mrqa_bytes(
            {"header": {}},
            {"context": "abc", "qas": [{"qid": "q1", "question": "?", "answers": ["abc"],
                                        "detected_answers": [{"text": "abc", "char_spans": [[0, 5]]}]}]},
        )
        with pytest.raises(ValidationError, match="out of bounds"):
            parse_mrqa(io.BytesIO(data))

    def test_duplicate_qid_rejected(self):
        qa = {"qid": "q1", "question": "?", "answers": ["abc"],
              "detected_answers": [{"text": "abc", "char_spans": [[0, 2]]}]}
        data = mrqa_bytes({"header": {}}, {"context": "abc", "qas": [qa, qa]})
        with pytest.raises(ValidationError, match="duplicate qid"):
            parse_mrqa(io.BytesIO(data))

    def test_multiple_qas_flattened_in_order(self):
        data = mrqa_bytes(
            {"header": {}},
            {"context": "alpha beta", "qas": [
                {"qid": "q1", "question": "?", "answers": ["alpha"],
                 "detected_answers": [{"text": "alpha", "char_spans": [[0, 4]]}]},
                {"qid": "q2", "question": "?", "answers": ["beta"],
                 "detected_answers": [{"text": "beta", "char_spans": [[6, 9]]}]},
            ]},
        )
        ds = parse_mrqa(io.BytesIO(data))
        assert [i.qid for i in ds.instances] == ["q1", "q2"]
        assert all(i.context == "alpha beta" for i in ds.instances)

    def test_inclusive_spans_become_half_open(self):
        ds = parse_mrqa(io.BytesIO(ww1_file_bytes()))
        start, end = ds.instances[0].answer_spans[0]
        assert end - start == len("Germany")


class TestWrite:
    def test_round_trip_identity(self, ww1_dataset):
        buf = io.BytesIO()
        write_mrqa(ww1_dataset, buf)
        again = parse_mrqa(io.BytesIO(buf.getvalue()))
        assert again == ww1_dataset

    def test_round_trip_of_parsed_file(self):
        original = parse_mrqa(io.BytesIO(ww1_file_bytes()))
        buf = io.BytesIO()
        write_mrqa(original, buf)
        assert parse_mrqa(io.BytesIO(buf.getvalue())) == original

    def test_empty_dataset_writes_header_only(self):
        buf = io.BytesIO()
        write_mrqa(Dataset(header={"k": 1}), buf)
        lines = buf.getvalue().splitlines()
        assert len(lines) == 1
        assert json.loads(lines[0]) == {"header": {"k": 1}}

    def test_two_writes_byte_identical(self, ww1_dataset):
        digests = []
        for _ in range(2):
            buf = io.BytesIO()
            write_mrqa(ww1_dataset, buf)
            digests.append(hashlib.sha256(buf.getvalue()).hexdigest())
        assert digests[0] == digests[1]

    def test_gzip_round_trip_and_determinism(self, tmp_path, ww1_dataset):
        path_a = tmp_path / "a.jsonl.gz"
        path_b = tmp_path / "b.jsonl.gz"
        write_mrqa(ww1_dataset, path_a)
        write_mrqa(ww1_dataset, path_b)
        assert path_a.read_bytes() == path_b.read_bytes()
        with gzip.open(path_a) as fh:
            assert fh.readline().startswith(b'{"header"')
        assert parse_mrqa(path_a) == ww1_dataset


inst_text = st.text(alphabet=string.ascii_letters + "éüñ", min_size=1, max_size=8)


@st.composite
def qa_instances(draw, qid: str):
    answer = draw(inst_text)
    pre = draw(inst_text)
    post = draw(inst_text)
    context = f"{pre} {answer} {post}"
    start = len(pre) + 1
    return QAInstance(
        qid=qid,
        question=draw(inst_text),
        context=context,
        gold_answers=(answer,),
        answer_spans=((start, start + len(answer)),),
    )


@st.composite
def datasets(draw):
    count = draw(st.integers(min_value=0, max_value=6))
    instances = [draw(qa_instances(f"q{i}")) for i in range(count)]
    return Dataset(header={"dataset": "hyp"}, instances=instances)


@settings(max_examples=50, deadline=None)
@given(datasets())
def test_round_trip_property(dataset):
    buf = io.BytesIO()
    write_mrqa(dataset, buf)
    assert parse_mrqa(io.BytesIO(buf.getvalue())) == dataset


class TestValidate:
    def test_clean_instance(self, ww1_instance):
        assert validate_instance(ww1_instance) == []

    def test_span_past_end(self):
        inst = QAInstance(qid="q", question="?", context="abc",
                          gold_answers=("abc",), answer_spans=((0, 9),))
        violations = validate_instance(inst)
        assert violations == ["answer_spans[0]: end > context length"]

    def test_span_text_mismatch(self):
        inst = QAInstance(qid="q", question="?", context="abcdef",
                          gold_answers=("zzz",), answer_spans=((0, 3),))
        violations = validate_instance(inst)
        assert len(violations) == 1
        assert "does not match any gold answer" in violations[0]

    def test_whitespace_collapse_tolerated(self):
        inst = QAInstance(qid="q", question="?", context="new  york city",
                          gold_answers=("new york city",), answer_spans=((0, 14),))
        assert validate_instance(inst) == []


def test_streaming_memory_bounded(tmp_path):
    # file is tens of MB; iterating it should never hold more than a few lines
    path = tmp_path / "big.jsonl"
    filler = "lorem ipsum dolor sit amet " * 2400  # ~64 KB per context
    with open(path, "wb") as fh:
        fh.write(json.dumps({"header": {}}).encode() + b"\n")
        for i in range(200):
            line = {
                "context": f"answer{i} {filler}",
                "qas": [{
                    "qid": f"q{i}", "question": "?", "answers": [f"answer{i}"],
                    "detected_answers": [{"text": f"answer{i}",
                                          "char_spans": [[0, len(f"answer{i}") - 1]]}],
                }],
            }
            fh.write(json.dumps(line).encode() + b"\n")
    file_size = path.stat().st_size
    assert file_size > 10_000_000

    tracemalloc.start()
    with open(path, "rb") as fh:
        reader = MrqaReader(fh)
        count = sum(1 for _ in reader)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    assert count == 200
    assert peak < 2_000_000, f"peak memory {peak} should stay far below the {file_size}-byte file"
