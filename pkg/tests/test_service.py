from __future__ import annotations

import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

import fixture_gen
from revcurate.service import create_app
from revcurate.store import AnnotationStore

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def store(tmp_path, annot10):
    return AnnotationStore(tmp_path / "store", annot10, ("alice", "bob"))


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def _labels(**overrides):
    base = {
        "types": ["Refactoring"],
        "natures": ["Prescriptive"],
        "civility": "Civil",
        "relevance": 7,
        "clarity": 7,
        "conciseness": 7,
    }
    base.update(overrides)
    return base


def _post(client, sample_id, annotator, labels=None, note=""):
    return client.post(
        "/api/annotations",
        json={
            "sample_id": sample_id,
            "annotator_id": annotator,
            "labels": labels or _labels(),
            "note": note,
        },
    )


def test_health_and_session(client):
    assert client.get("/api/health").json() == {"status": "ok"}
    session = client.get("/api/session").json()
    assert session["annotators"] == ["alice", "bob"]
    assert session["total"] == 10
    assert session["remaining"] == {"alice": 10, "bob": 10}


def test_next_sample_progression(client):
    first = client.get("/api/samples/next", params={"annotator": "alice"}).json()
    assert first["sample"]["id"] == "000000"
    assert first["remaining"] == 10
    _post(client, "000000", "alice")
    second = client.get("/api/samples/next", params={"annotator": "alice"}).json()
    assert second["sample"]["id"] == "000001"
    assert second["remaining"] == 9


def test_next_sample_unknown_annotator(client):
    response = client.get("/api/samples/next", params={"annotator": "carol"})
    assert response.status_code == 404


def test_out_of_range_score_is_400_naming_field(client):
    response = _post(client, "000000", "alice", _labels(clarity=11))
    assert response.status_code == 400
    assert response.json()["field"] == "clarity"


def test_invalid_labels_400(client):
    response = _post(client, "000000", "alice", _labels(types=[]))
    assert response.status_code == 400
    assert response.json()["field"] == "types"
    response = _post(client, "000000", "alice", _labels(civility="polite"))
    assert response.status_code == 400
    assert response.json()["field"] == "civility"


def test_unknown_sample_404(client):
    response = _post(client, "zzzzzz", "alice")
    assert response.status_code == 404


def test_duplicate_annotation_409(client):
    assert _post(client, "000000", "alice").status_code == 201
    assert _post(client, "000000", "alice").status_code == 409


def test_no_conflicts_when_identical(client, annot10):
    for sample in annot10:
        for annotator in ("alice", "bob"):
            assert _post(client, sample.id, annotator).status_code == 201
    assert client.get("/api/conflicts").json() == {"conflicts": []}


def test_engineered_conflicts_and_resolutions(client, annot10):
    session = fixture_gen.make_annotation_session()
    for record in session["alice"] + session["bob"]:
        response = client.post("/api/annotations", json=record)
        assert response.status_code == 201, response.text

    conflicts = client.get("/api/conflicts").json()["conflicts"]
    assert [(c["sample_id"], c["dimension"]) for c in conflicts] == list(fixture_gen.DISAGREEMENTS)
    # both annotators' values are visible side by side
    civility = conflicts[0]
    assert civility["values"]["alice"] == "Civil"
    assert civility["values"]["bob"] == "Uncivil"

    # resolving a non-conflict is a 404
    bogus = client.post(
        "/api/resolutions",
        json={"sample_id": "000000", "dimension": "clarity", "value": 5},
    )
    assert bogus.status_code == 404

    for resolution in session["resolutions"]:
        response = client.post("/api/resolutions", json=resolution)
        assert response.status_code == 201, response.text

    assert client.get("/api/conflicts").json() == {"conflicts": []}

    export_lines = [
        json.loads(line)
        for line in client.get("/api/export").text.splitlines()
        if line.strip()
    ]
    annotations = [l for l in export_lines if l["kind"] == "annotation"]
    consensus = [l for l in export_lines if l["kind"] == "consensus"]
    assert len(annotations) == 20
    assert len(consensus) == 10
    by_id = {c["sample_id"]: c for c in consensus}
    # resolution picked annotator B's civility for 000003
    assert by_id["000003"]["labels"]["civility"] == "Uncivil"
    assert "tone" in by_id["000003"]["resolution_note"]
    # resolution picked annotator A's clarity for 000005
    alice_clarity = next(
        r for r in session["alice"] if r["sample_id"] == "000005"
    )["labels"]["clarity"]
    assert by_id["000005"]["labels"]["clarity"] == alice_clarity


def test_invalid_resolution_value_400(client, annot10):
    session = fixture_gen.make_annotation_session()
    for record in session["alice"] + session["bob"]:
        client.post("/api/annotations", json=record)
    response = client.post(
        "/api/resolutions",
        json={"sample_id": "000003", "dimension": "civility", "value": "polite"},
    )
    assert response.status_code == 400
    assert response.json()["field"] == "civility"


def test_consensus_requires_all_conflicts_resolved(client, annot10):
    session = fixture_gen.make_annotation_session()
    for record in session["alice"] + session["bob"]:
        client.post("/api/annotations", json=record)
    export_lines = [
        json.loads(line)
        for line in client.get("/api/export").text.splitlines()
        if line.strip()
    ]
    consensus_ids = {l["sample_id"] for l in export_lines if l["kind"] == "consensus"}
    # the three conflicted samples have no consensus yet
    assert consensus_ids == {f"{i:06d}" for i in range(10)} - {"000003", "000005", "000008"}


def test_store_crash_recovery(tmp_path, annot10):
    from revcurate.agreement import AnnotationRecord
    from revcurate.store import labels_from_payload

    root = tmp_path / "store"
    store = AnnotationStore(root, annot10, ("alice", "bob"))
    for i in range(3):
        store.add_annotation(
            AnnotationRecord(
                sample_id=f"{i:06d}",
                annotator_id="alice",
                labels=labels_from_payload(_labels(relevance=i + 1)),
            )
        )
    # no clean shutdown: a fresh instance replays the fsync'd log
    reopened = AnnotationStore(root, annot10, ("alice", "bob"))
    records = reopened.annotations()
    assert [(r.sample_id, r.labels.relevance) for r in records] == [
        ("000000", 1),
        ("000001", 2),
        ("000002", 3),
    ]
    with pytest.raises(Exception):
        reopened.add_annotation(
            AnnotationRecord(
                sample_id="000000",
                annotator_id="alice",
                labels=labels_from_payload(_labels()),
            )
        )


def test_export_stable_ordering(client, annot10):
    session = fixture_gen.make_annotation_session()
    # interleave annotators; export order must stay (sample, annotator) sorted
    for pair in zip(session["bob"], session["alice"]):
        for record in pair:
            client.post("/api/annotations", json=record)
    first = client.get("/api/export").text
    second = client.get("/api/export").text
    assert first == second
    lines = [json.loads(l) for l in first.splitlines() if l.strip()]
    annotation_keys = [
        (l["sample_id"], l["annotator_id"]) for l in lines if l["kind"] == "annotation"
    ]
    assert annotation_keys == sorted(annotation_keys)


def test_static_dir_mount(tmp_path, store):
    static = tmp_path / "static"
    static.mkdir()
    (static / "index.html").write_text("<html><body>ui</body></html>", encoding="utf-8")
    client = TestClient(create_app(store, static_dir=static))
    response = client.get("/")
    assert response.status_code == 200
    assert "ui" in response.text
    assert client.get("/api/health").json() == {"status": "ok"}
