"""Administrative command line: serve the API, ingest feeds, seed demo
data, compute feeds offline, evaluate, export reports, tabulate surveys.

Exit codes are a stable scripting contract: 0 success, 1 domain or
validation error, 2 I/O or environment error. Every subcommand with a
JSON mode prints schema-stable, machine-parseable output. Scoring always
goes through the engine modules; nothing is reimplemented here.
"""

from __future__ import annotations

import csv
import functools
import json
import socket
import sys
from datetime import date
from pathlib import Path

import click

from .config import AppConfig, load_config
from .domain import ValidationError
from .evalharness import SyntheticSpec, generate_population, leave_one_out
from .ingestion import FeedParseError, TagVocabulary, ingest_feed
from .persistence import (
    DuplicateError,
    NotFoundError,
    PersistenceError,
    Repository,
    save_state,
)
from .recommender import recommend
from .reports import CSV_HEADERS, build_attendance_report, report_to_csv
from .survey import SCALES, LikertResponseSet, tabulate


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    """Map exception classes onto the CLI exit-code contract."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValidationError, NotFoundError, DuplicateError, FeedParseError) as exc:
            _fail(1, str(exc))
        except PersistenceError as exc:
            _fail(2, str(exc))
        except OSError as exc:
            _fail(2, str(exc))

    return wrapper


def _open_repo(data: str | None) -> Repository:
    return Repository(data or DEFAULT_DATA_PATH)


def _load_vocab(path: str | None) -> TagVocabulary:
    return TagVocabulary.from_json_file(path) if path else TagVocabulary()


def _format_table(headers: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


DEFAULT_DATA_PATH = "stp-state.json"

data_option = click.option(
    "--data",
    envvar="STP_DATA",
    default=None,
    help=f"State snapshot file (env: STP_DATA, default: {DEFAULT_DATA_PATH}).",
)


@click.group()
def main() -> None:
    """Seminar and training program recommender."""


@main.command()
@click.option("--port", type=int, default=None, help="Listen port.")
@data_option
@click.option("--config", "config_path", default=None, help="JSON config file.")
@click.option("--host", default="127.0.0.1", show_default=True)
@_guarded
def serve(port: int | None, data: str, config_path: str | None, host: str) -> None:
    """Run the HTTP API over the given state file."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path) if config_path else AppConfig()
    if port is None:
        port = config.port
    if data is None:
        data = config.data_path

    repo = Repository(data)
    repo.save()  # materialize a fresh store so health reflects a real file
    vocab = _load_vocab(config.vocab_path)

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, port))
    except OSError as exc:
        _fail(2, f"cannot bind {host}:{port}: {exc}")
    finally:
        probe.close()

    app = create_app(repo, config, vocab)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@main.command()
@click.argument("feed", type=click.Path(exists=True, dir_okay=False))
@click.option("--vocab", "vocab_path", default=None, help="Tag vocabulary JSON file.")
@data_option
@_guarded
def ingest(feed: str, vocab_path: str | None, data: str | None) -> None:
    """Ingest a feed file into the catalog and print the report."""
    repo = _open_repo(data)
    vocab = _load_vocab(vocab_path)
    payload = Path(feed).read_bytes()
    report = ingest_feed(payload, vocab, repo, source=Path(feed).name)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command("recommend")
@click.option("--faculty", "faculty_id", required=True, help="Faculty id to recommend for.")
@click.option("--limit", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--include-past", is_flag=True, default=False)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
@data_option
@_guarded
def recommend_cmd(
    faculty_id: str,
    limit: int | None,
    alpha: float | None,
    include_past: bool,
    fmt: str,
    data: str | None,
) -> None:
    """Print the ranked feed for one faculty member."""
    from .service import recommendations_payload

    repo = _open_repo(data)
    profile = repo.get_faculty(faculty_id)
    params = AppConfig().recommend_params(alpha, limit, include_past)
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
    payload = recommendations_payload(recs, snapshot.items_by_id())
    if fmt == "json":
        # Matches the API's JSON rendering byte for byte.
        click.echo(json.dumps(payload, ensure_ascii=False, separators=(",", ":")))
        return
    rows = [
        (
            entry["item"]["title"],
            f"{entry['score']:.4f}",
            f"{entry['content_component']:.4f}",
            f"{entry['collab_component']:.4f}",
            ", ".join(entry["matched_terms"]),
        )
        for entry in payload
    ]
    click.echo(_format_table(("title", "score", "content", "collab", "matched"), rows))


@main.command()
@click.option("--faculty", "n_faculty", type=int, required=True)
@click.option("--items", "n_items", type=int, required=True)
@click.option("--clusters", "n_clusters", type=int, default=1, show_default=True)
@click.option("--like-prob", type=float, default=0.3, show_default=True)
@click.option("--seed", "rng_seed", type=int, default=0, show_default=True)
@data_option
@_guarded
def seed(
    n_faculty: int,
    n_items: int,
    n_clusters: int,
    like_prob: float,
    rng_seed: int,
    data: str | None,
) -> None:
    """Write a deterministic synthetic state for demos and evaluation."""
    spec = SyntheticSpec(
        seed=rng_seed,
        n_faculty=n_faculty,
        n_items=n_items,
        n_clusters=n_clusters,
        like_prob=like_prob,
    )
    state = generate_population(spec)
    path = data or DEFAULT_DATA_PATH
    save_state(state, path)
    click.echo(json.dumps({"path": path, **state.counts()}))


@main.command("eval")
@click.option("--k", type=int, default=5, show_default=True)
@data_option
@_guarded
def eval_cmd(k: int, data: str | None) -> None:
    """Leave-one-out hit rate against the random baseline."""
    repo = _open_repo(data)
    result = leave_one_out(repo.snapshot, AppConfig().recommend_params(), k)
    click.echo(json.dumps(result.to_dict()))


@main.command()
@click.option("--college", default=None)
@click.option("--from", "date_from", default=None, help="Earliest date_attended (ISO).")
@click.option("--to", "date_to", default=None, help="Latest date_attended (ISO).")
@click.option(
    "--format", "fmt", type=click.Choice(["table", "json", "csv"]), default="table"
)
@data_option
@_guarded
def report(
    college: str | None,
    date_from: str | None,
    date_to: str | None,
    fmt: str,
    data: str | None,
) -> None:
    """Consolidated attendance report."""

    def _parse(name: str, value: str | None) -> date | None:
        if value is None:
            return None
        try:
            return date.fromisoformat(value)
        except ValueError:
            raise ValidationError(f"invalid date for {name!r}: {value!r}") from None

    repo = _open_repo(data)
    rows = build_attendance_report(
        repo.snapshot,
        college=college,
        date_from=_parse("from", date_from),
        date_to=_parse("to", date_to),
    )
    if fmt == "csv":
        click.echo(report_to_csv(rows), nl=False)
    elif fmt == "json":
        click.echo(json.dumps([row.to_dict() for row in rows]))
    else:
        click.echo(
            _format_table(
                CSV_HEADERS,
                [
                    (
                        r.faculty_name,
                        r.college,
                        r.title,
                        r.provider,
                        r.date_attended.isoformat(),
                    )
                    for r in rows
                ],
            )
        )


@main.command()
@click.argument("csv_file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--scale",
    type=click.Choice(sorted(SCALES)),
    required=True,
    help="Interpretation scale for the means.",
)
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table")
@_guarded
def survey(csv_file: str, scale: str, fmt: str) -> None:
    """Tabulate a Likert survey CSV: item text, then counts for values 1..5."""
    with open(csv_file, "r", encoding="utf-8", newline="") as handle:
        raw_rows = [row for row in csv.reader(handle) if row]

    response_sets = []
    for line_no, row in enumerate(raw_rows, start=1):
        if len(row) != 6:
            raise ValidationError(
                f"row {line_no}: expected item text plus 5 counts, got {len(row)} fields"
            )
        try:
            counts = {value: int(cell) for value, cell in zip((1, 2, 3, 4, 5), row[1:])}
        except ValueError:
            raise ValidationError(f"row {line_no}: counts must be integers") from None
        try:
            response_sets.append(LikertResponseSet(item_text=row[0], counts=counts))
        except ValidationError as exc:
            raise ValidationError(f"row {line_no}: {exc}") from None
    if not response_sets:
        raise ValidationError("survey file has no rows")

    table = tabulate(response_sets, SCALES[scale])
    if fmt == "json":
        click.echo(json.dumps(table.to_dict()))
        return
    body = [
        (row.item_text, f"{row.mean:.2f}", row.interpretation, str(row.rank))
        for row in table.rows
    ]
    click.echo(_format_table(("item", "mean", "interpretation", "rank"), body))
    click.echo(
        f"Composite Mean  {table.composite_mean:.2f}  {table.composite_interpretation}"
    )


if __name__ == "__main__":
    main()
