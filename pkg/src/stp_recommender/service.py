"""HTTP/JSON API over the recommender engine.

Thin by design: requests parse, validate, and delegate to the engine
modules; no scoring logic lives here. Recommendations are computed fresh
on every request so a like is visible to the next feed fetch. Every
non-2xx response body has the same shape: status, code, message, and an
optional details list.
"""

from __future__ import annotations

import uuid
from datetime import date
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field
from starlette.exceptions import HTTPException as StarletteHTTPException

from .config import AppConfig
from .domain import FacultyProfile, Recommendation, StpItem, ValidationError
from .ingestion import FeedParseError, TagVocabulary, ingest_feed
from .persistence import DuplicateError, NotFoundError, Repository
from .recommender import recommend
from .reports import build_attendance_report, report_to_csv

_ERROR_CODES = {400: "validation_failed", 404: "not_found", 409: "duplicate"}


class FacultyBody(BaseModel):
    name: str
    college: str
    programs: list[str] = Field(default_factory=list)
    interests: list[str] = Field(default_factory=list)
    expertise: list[str] = Field(default_factory=list)


class LikeBody(BaseModel):
    stp_id: str


class AttendanceBody(BaseModel):
    stp_id: str
    date_attended: date
    remarks: str | None = None


def api_error(
    status: int, code: str, message: str, details: list[str] | None = None
) -> JSONResponse:
    body: dict[str, Any] = {"status": status, "code": code, "message": message}
    if details:
        body["details"] = details
    return JSONResponse(status_code=status, content=body)


def faculty_payload(profile: FacultyProfile, liked: list[str] | None = None) -> dict[str, Any]:
    payload = {
        "faculty_id": profile.faculty_id,
        "name": profile.name,
        "college": profile.college,
        "programs": sorted(profile.programs),
        "interests": sorted(profile.interests),
        "expertise": sorted(profile.expertise),
        "created_at": profile.created_at.isoformat(),
        "updated_at": profile.updated_at.isoformat(),
    }
    if liked is not None:
        payload["liked_stp_ids"] = liked
    return payload


def item_payload(item: StpItem) -> dict[str, Any]:
    return {
        "stp_id": item.stp_id,
        "title": item.title,
        "provider": item.provider,
        "start_date": item.start_date.isoformat(),
        "end_date": item.end_date.isoformat() if item.end_date else None,
        "url": item.url,
        "description": item.description,
        "tags": sorted(item.tags),
        "source": item.source,
    }


def recommendation_payload(rec: Recommendation, item: StpItem) -> dict[str, Any]:
    return {
        "stp_id": rec.stp_id,
        "score": rec.score,
        "content_component": rec.content_component,
        "collab_component": rec.collab_component,
        "matched_terms": list(rec.matched_terms),
        "contributing_neighbors": [
            {"faculty_id": fid, "similarity": sim}
            for fid, sim in rec.contributing_neighbors
        ],
        "item": item_payload(item),
    }


def recommendations_payload(
    recs: list[Recommendation], items_by_id: dict[str, StpItem]
) -> list[dict[str, Any]]:
    return [recommendation_payload(rec, items_by_id[rec.stp_id]) for rec in recs]


def create_app(
    repo: Repository,
    config: AppConfig | None = None,
    vocab: TagVocabulary | None = None,
) -> FastAPI:
    config = config or AppConfig()
    vocab = vocab or TagVocabulary()
    app = FastAPI(title="STP Recommender", docs_url=None, redoc_url=None)

    @app.exception_handler(ValidationError)
    def _validation(_req: Request, exc: ValidationError) -> JSONResponse:
        return api_error(400, "validation_failed", str(exc), exc.violations)

    @app.exception_handler(NotFoundError)
    def _not_found(_req: Request, exc: NotFoundError) -> JSONResponse:
        return api_error(404, "not_found", str(exc))

    @app.exception_handler(DuplicateError)
    def _duplicate(_req: Request, exc: DuplicateError) -> JSONResponse:
        return api_error(409, "duplicate", str(exc))

    @app.exception_handler(FeedParseError)
    def _parse_error(_req: Request, exc: FeedParseError) -> JSONResponse:
        return api_error(400, "parse_error", str(exc))

    @app.exception_handler(RequestValidationError)
    def _request_invalid(_req: Request, exc: RequestValidationError) -> JSONResponse:
        details = [
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        return api_error(400, "validation_failed", "invalid request", details)

    @app.exception_handler(StarletteHTTPException)
    def _http_error(_req: Request, exc: StarletteHTTPException) -> JSONResponse:
        code = _ERROR_CODES.get(exc.status_code, "internal")
        return api_error(exc.status_code, code, str(exc.detail))

    @app.exception_handler(Exception)
    def _internal(_req: Request, exc: Exception) -> JSONResponse:
        return api_error(500, "internal", f"internal error: {exc}")

    # --- health ---------------------------------------------------------------

    @app.get("/api/health")
    def health() -> dict[str, Any]:
        snapshot = repo.snapshot
        return {"schema_version": snapshot.schema_version, "counts": snapshot.counts()}

    # --- faculty ---------------------------------------------------------------

    @app.post("/api/faculty", status_code=201)
    def create_faculty(body: FacultyBody) -> dict[str, Any]:
        faculty_id = uuid.uuid4().hex[:12]
        profile = repo.upsert_faculty(
            faculty_id,
            body.name,
            body.college,
            body.programs,
            body.interests,
            body.expertise,
        )
        return faculty_payload(profile, liked=[])

    @app.get("/api/faculty")
    def list_faculty() -> list[dict[str, Any]]:
        return [faculty_payload(p) for p in repo.list_faculty()]

    @app.get("/api/faculty/{faculty_id}")
    def get_faculty(faculty_id: str) -> dict[str, Any]:
        profile = repo.get_faculty(faculty_id)
        liked = sorted(
            like.stp_id
            for like in repo.snapshot.likes
            if like.faculty_id == faculty_id
        )
        return faculty_payload(profile, liked=liked)

    @app.put("/api/faculty/{faculty_id}")
    def update_faculty(faculty_id: str, body: FacultyBody) -> dict[str, Any]:
        repo.get_faculty(faculty_id)  # 404 before creating anything
        profile = repo.upsert_faculty(
            faculty_id,
            body.name,
            body.college,
            body.programs,
            body.interests,
            body.expertise,
        )
        return faculty_payload(profile)

    # --- recommendations ----------------------------------------------------------

    @app.get("/api/faculty/{faculty_id}/recommendations")
    def get_recommendations(
        faculty_id: str,
        limit: int | None = None,
        alpha: float | None = None,
        include_past: bool = False,
    ) -> JSONResponse:
        profile = repo.get_faculty(faculty_id)
        params = config.recommend_params(alpha, limit, include_past)
        snapshot = repo.snapshot
        recs = recommend(
            profile,
            snapshot.items,
            snapshot.faculty,
            snapshot.likes,
            snapshot.attendance,
            params,
            today=date.today(),
        )
        return JSONResponse(
            content=recommendations_payload(recs, snapshot.items_by_id())
        )

    # --- likes ---------------------------------------------------------------------

    @app.post("/api/faculty/{faculty_id}/likes", status_code=201)
    def add_like(faculty_id: str, body: LikeBody) -> dict[str, Any]:
        like = repo.add_like(faculty_id, body.stp_id)
        return {
            "faculty_id": like.faculty_id,
            "stp_id": like.stp_id,
            "liked_at": like.liked_at.isoformat(),
        }

    @app.delete("/api/faculty/{faculty_id}/likes/{stp_id}", status_code=204)
    def remove_like(faculty_id: str, stp_id: str) -> Response:
        repo.remove_like(faculty_id, stp_id)
        return Response(status_code=204)

    # --- attendance -----------------------------------------------------------------

    @app.post("/api/faculty/{faculty_id}/attendance", status_code=201)
    def add_attendance(faculty_id: str, body: AttendanceBody) -> dict[str, Any]:
        record = repo.add_attendance(
            faculty_id, body.stp_id, body.date_attended, body.remarks
        )
        return {
            "faculty_id": record.faculty_id,
            "stp_id": record.stp_id,
            "date_attended": record.date_attended.isoformat(),
            "remarks": record.remarks,
        }

    @app.get("/api/reports/attendance")
    def attendance_report(
        college: str | None = None,
        date_from: str | None = Query(None, alias="from"),
        date_to: str | None = Query(None, alias="to"),
        format: str = "json",
    ):
        def _parse(name: str, value: str | None) -> date | None:
            if value is None:
                return None
            try:
                return date.fromisoformat(value)
            except ValueError:
                raise ValidationError(f"invalid date for {name!r}: {value!r}") from None

        rows = build_attendance_report(
            repo.snapshot,
            college=college,
            date_from=_parse("from", date_from),
            date_to=_parse("to", date_to),
        )
        if format == "csv":
            return Response(content=report_to_csv(rows), media_type="text/csv")
        if format != "json":
            raise ValidationError(f"format must be json or csv, got {format!r}")
        return JSONResponse(content=[row.to_dict() for row in rows])

    # --- catalog and ingestion ---------------------------------------------------------

    @app.get("/api/stp")
    def list_stp() -> list[dict[str, Any]]:
        return [item_payload(item) for item in repo.list_items()]

    @app.get("/api/stp/{stp_id}")
    def get_stp(stp_id: str) -> dict[str, Any]:
        return item_payload(repo.get_item(stp_id))

    @app.post("/api/admin/ingest")
    async def admin_ingest(request: Request, source: str = "api") -> dict[str, Any]:
        body = await request.body()
        report = ingest_feed(body, vocab, repo, source=source)
        return report.to_dict()

    return app
