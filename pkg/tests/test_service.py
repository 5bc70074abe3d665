"""API contract tests over the in-process HTTP stack."""

from __future__ import annotations

import csv
import io
import json
from datetime import date

import pytest
from fastapi.testclient import TestClient

from stp_recommender.config import AppConfig
from stp_recommender.ingestion import TagVocabulary
from stp_recommender.persistence import Repository
from stp_recommender.recommender import recommend
from stp_recommender.service import create_app, recommendations_payload

JOSH_BODY = {
    "name": "Josh Magtibay",
    "college": "CABEIHM",
    "programs": ["BS-HRM", "BS-Accountancy"],
    "interests": ["Accounting", "Finance"],
    "expertise": [],
}
BENJIE_BODY = {
    "name": "Benjie A Bautista",
    "college": "CABEIHM",
    "programs": ["BS-Accountancy", "BS Business Administration"],
    "interests": ["Finance", "Entrepreneurship", "Business Management"],
    "expertise": [],
}

FEED = [
    {
        "title": "Finance Forum",
        "provider": "CHED",
        "start_date": "2030-02-01",
        "explicit_tags": ["finance"],
    },
    {
        "title": "Tax Update",
        "provider": "CHED",
        "start_date": "2030-02-02",
        "explicit_tags": ["accounting", "taxation"],
    },
    {
        "title": "Network Security",
        "provider": "CHED",
        "start_date": "2030-02-03",
        "explicit_tags": ["networking"],
    },
]


@pytest.fixture
def repo(tmp_path):
    return Repository(tmp_path / "state.json")


@pytest.fixture
def client(repo):
    app = create_app(repo, AppConfig(), TagVocabulary())
    with TestClient(app) as test_client:
        yield test_client


def _create(client, body) -> str:
    response = client.post("/api/faculty", json=body)
    assert response.status_code == 201
    return response.json()["faculty_id"]


def _stp_ids_by_title(client) -> dict[str, str]:
    response = client.get("/api/stp")
    assert response.status_code == 200
    return {item["title"]: item["stp_id"] for item in response.json()}


def _worked_example(client) -> tuple[str, str, dict[str, str]]:
    josh_id = _create(client, JOSH_BODY)
    benjie_id = _create(client, BENJIE_BODY)
    response = client.post("/api/admin/ingest", content=json.dumps(FEED).encode())
    assert response.status_code == 200
    assert response.json()["added"] == 3
    ids = _stp_ids_by_title(client)
    liked = client.post(
        f"/api/faculty/{benjie_id}/likes", json={"stp_id": ids["Finance Forum"]}
    )
    assert liked.status_code == 201
    return josh_id, benjie_id, ids


# --- health and faculty ------------------------------------------------------


def test_health_fresh_store(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    body = response.json()
    assert body["schema_version"] == 1
    assert body["counts"] == {"faculty": 0, "items": 0, "likes": 0, "attendance": 0}


def test_create_faculty_normalizes_tokens(client):
    response = client.post("/api/faculty", json=JOSH_BODY)
    assert response.status_code == 201
    body = response.json()
    assert body["college"] == "cabeihm"
    assert body["programs"] == ["bs-accountancy", "bs-hrm"]
    assert body["interests"] == ["accounting", "finance"]
    assert body["faculty_id"]


def test_get_unknown_faculty_is_404(client):
    response = client.get("/api/faculty/ghost")
    assert response.status_code == 404
    body = response.json()
    assert body["code"] == "not_found"
    assert body["status"] == 404
    assert "message" in body


def test_put_empty_college_is_400(client):
    faculty_id = _create(client, JOSH_BODY)
    response = client.put(
        f"/api/faculty/{faculty_id}", json={**JOSH_BODY, "college": ""}
    )
    assert response.status_code == 400
    assert response.json()["code"] == "validation_failed"


def test_put_unknown_faculty_is_404(client):
    response = client.put("/api/faculty/ghost", json=JOSH_BODY)
    assert response.status_code == 404


def test_put_renormalizes_and_returns_profile(client):
    faculty_id = _create(client, JOSH_BODY)
    response = client.put(
        f"/api/faculty/{faculty_id}",
        json={**JOSH_BODY, "interests": ["Data  Science"]},
    )
    assert response.status_code == 200
    assert response.json()["interests"] == ["data-science"]


def test_list_faculty(client):
    _create(client, JOSH_BODY)
    _create(client, BENJIE_BODY)
    response = client.get("/api/faculty")
    assert response.status_code == 200
    assert len(response.json()) == 2


def test_malformed_body_is_400_api_error(client):
    response = client.post("/api/faculty", json={"name": "No College"})
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "validation_failed"
    assert any("college" in d for d in body["details"])


# --- recommendations -----------------------------------------------------------


def test_worked_example_recommendations(client):
    josh_id, _, ids = _worked_example(client)
    response = client.get(f"/api/faculty/{josh_id}/recommendations")
    assert response.status_code == 200
    feed = response.json()
    assert [entry["item"]["title"] for entry in feed] == ["Finance Forum", "Tax Update"]
    assert feed[0]["score"] == pytest.approx(1.0, abs=1e-9)
    assert feed[0]["collab_component"] == pytest.approx(1.0, abs=1e-9)
    assert feed[1]["score"] == pytest.approx(0.25, abs=1e-9)
    assert feed[0]["stp_id"] == ids["Finance Forum"]
    assert feed[0]["contributing_neighbors"][0]["similarity"] == pytest.approx(0.46875)


def test_limit_truncates_feed(client):
    josh_id, _, _ = _worked_example(client)
    response = client.get(f"/api/faculty/{josh_id}/recommendations?limit=1")
    assert len(response.json()) == 1


def test_invalid_params_are_400(client):
    josh_id, _, _ = _worked_example(client)
    assert (
        client.get(f"/api/faculty/{josh_id}/recommendations?alpha=2").status_code == 400
    )
    assert (
        client.get(f"/api/faculty/{josh_id}/recommendations?limit=0").status_code == 400
    )
    assert (
        client.get(
            f"/api/faculty/{josh_id}/recommendations?alpha=not-a-number"
        ).status_code
        == 400
    )


def test_recommendations_for_unknown_faculty_404(client):
    assert client.get("/api/faculty/ghost/recommendations").status_code == 404


def test_like_immediately_visible_in_neighbor_feed(client):
    """The feedback loop: a like reshapes a similar faculty's next fetch."""
    josh_id = _create(client, JOSH_BODY)
    benjie_id = _create(client, BENJIE_BODY)
    client.post("/api/admin/ingest", content=json.dumps(FEED).encode())
    ids = _stp_ids_by_title(client)

    before = client.get(f"/api/faculty/{josh_id}/recommendations").json()
    tax_before = next(e for e in before if e["stp_id"] == ids["Tax Update"])
    assert tax_before["collab_component"] == 0.0

    client.post(f"/api/faculty/{benjie_id}/likes", json={"stp_id": ids["Tax Update"]})
    after = client.get(f"/api/faculty/{josh_id}/recommendations").json()
    tax_after = next(e for e in after if e["stp_id"] == ids["Tax Update"])
    assert tax_after["collab_component"] == pytest.approx(1.0)
    assert tax_after["score"] > tax_before["score"]


def test_api_adds_no_recommendation_logic(client, repo):
    """Golden comparison: endpoint output equals a direct engine call."""
    josh_id, _, _ = _worked_example(client)
    via_api = client.get(f"/api/faculty/{josh_id}/recommendations").json()

    snapshot = repo.snapshot
    profile = repo.get_faculty(josh_id)
    recs = recommend(
        snapshot.faculty_by_id()[josh_id],
        snapshot.items,
        snapshot.faculty,
        snapshot.likes,
        snapshot.attendance,
        AppConfig().recommend_params(),
        today=date.today(),
    )
    direct = recommendations_payload(recs, snapshot.items_by_id())
    assert via_api == direct
    assert profile.faculty_id == josh_id


# --- likes ------------------------------------------------------------------------


def test_like_conflict_and_unlike(client):
    josh_id, benjie_id, ids = _worked_example(client)
    repeat = client.post(
        f"/api/faculty/{benjie_id}/likes", json={"stp_id": ids["Finance Forum"]}
    )
    assert repeat.status_code == 409
    assert repeat.json()["code"] == "duplicate"

    gone = client.delete(f"/api/faculty/{benjie_id}/likes/{ids['Finance Forum']}")
    assert gone.status_code == 204

    again = client.delete(f"/api/faculty/{benjie_id}/likes/{ids['Finance Forum']}")
    assert again.status_code == 404


def test_like_unknown_item_is_404(client):
    josh_id = _create(client, JOSH_BODY)
    response = client.post(f"/api/faculty/{josh_id}/likes", json={"stp_id": "ghost"})
    assert response.status_code == 404


def test_liked_ids_visible_on_profile(client):
    _, benjie_id, ids = _worked_example(client)
    response = client.get(f"/api/faculty/{benjie_id}")
    assert response.json()["liked_stp_ids"] == [ids["Finance Forum"]]


# --- attendance and reports ----------------------------------------------------------


def test_attendance_report_flow(client):
    josh_id, benjie_id, ids = _worked_example(client)
    carla_id = _create(
        client,
        {
            "name": "Carla Reyes",
            "college": "CICS",
            "programs": [],
            "interests": ["Networking"],
            "expertise": [],
        },
    )
    for fid, title, day in [
        (josh_id, "Finance Forum", "2030-02-01"),
        (benjie_id, "Tax Update", "2030-02-02"),
        (carla_id, "Network Security", "2030-02-03"),
    ]:
        response = client.post(
            f"/api/faculty/{fid}/attendance",
            json={"stp_id": ids[title], "date_attended": day},
        )
        assert response.status_code == 201

    full = client.get("/api/reports/attendance").json()
    assert len(full) == 3
    # sorted by college, then name, then date
    assert [row["college"] for row in full] == ["cabeihm", "cabeihm", "cics"]
    assert [row["faculty_name"] for row in full][:2] == [
        "Benjie A Bautista",
        "Josh Magtibay",
    ]

    filtered = client.get("/api/reports/attendance?college=CABEIHM").json()
    assert len(filtered) == 2
    assert all(row["college"] == "cabeihm" for row in filtered)

    windowed = client.get(
        "/api/reports/attendance?from=2030-02-02&to=2030-02-03"
    ).json()
    assert {row["faculty_name"] for row in windowed} == {
        "Benjie A Bautista",
        "Carla Reyes",
    }


def test_attendance_report_csv_shape(client):
    josh_id, _, ids = _worked_example(client)
    client.post(
        f"/api/faculty/{josh_id}/attendance",
        json={"stp_id": ids["Tax Update"], "date_attended": "2030-02-02"},
    )
    response = client.get("/api/reports/attendance?format=csv")
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    text = response.text
    assert "\r\n" in text
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["faculty_name", "college", "title", "provider", "date_attended"]
    assert rows[1] == ["Josh Magtibay", "cabeihm", "Tax Update", "CHED", "2030-02-02"]


def test_empty_report_keeps_headers(client):
    response = client.get("/api/reports/attendance?format=csv")
    assert response.text.strip() == "faculty_name,college,title,provider,date_attended"
    assert client.get("/api/reports/attendance").json() == []


def test_invalid_date_range_is_400(client):
    response = client.get("/api/reports/attendance?from=2030-12-31&to=2030-01-01")
    assert response.status_code == 400
    assert response.json()["code"] == "validation_failed"


# --- ingestion and catalog -------------------------------------------------------------


def test_ingest_twice_reports_duplicates(client):
    payload = json.dumps(FEED).encode()
    first = client.post("/api/admin/ingest", content=payload).json()
    second = client.post("/api/admin/ingest", content=payload).json()
    assert first["added"] == 3
    assert second == {"added": 0, "duplicates_skipped": 3, "rejected": []}


def test_ingest_malformed_feed_is_400(client):
    response = client.post("/api/admin/ingest", content=b"[{broken")
    assert response.status_code == 400
    assert response.json()["code"] == "parse_error"


def test_ingest_bad_json_line_is_rejection_not_abort(client):
    response = client.post("/api/admin/ingest", content=b"{broken\n")
    assert response.status_code == 200
    body = response.json()
    assert body["added"] == 0
    assert len(body["rejected"]) == 1


def test_stp_listing_and_lookup(client):
    client.post("/api/admin/ingest", content=json.dumps(FEED).encode())
    items = client.get("/api/stp").json()
    assert len(items) == 3
    assert {"finance"} == set(
        next(i for i in items if i["title"] == "Finance Forum")["tags"]
    )
    one = client.get(f"/api/stp/{items[0]['stp_id']}")
    assert one.status_code == 200
    assert client.get("/api/stp/ghost").status_code == 404


def test_health_counts_track_mutations(client):
    josh_id, benjie_id, ids = _worked_example(client)
    client.post(
        f"/api/faculty/{josh_id}/attendance",
        json={"stp_id": ids["Tax Update"], "date_attended": "2030-02-02"},
    )
    counts = client.get("/api/health").json()["counts"]
    assert counts == {"faculty": 2, "items": 3, "likes": 1, "attendance": 1}
