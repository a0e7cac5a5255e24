"""Shared builders for archive-based tests and the stub store endpoint."""

from __future__ import annotations

import datetime as dt
import json
import random
import re
from http.server import BaseHTTPRequestHandler
from urllib.parse import parse_qs, urlparse

from reviewsent import AppRecord, Archive, Review, SentimentScore

# A dual score whose combined sentiment is the given value. Note that
# +1 and -1 are unreachable: p + n > 0 forces p >= 2, symmetrically for n.
COMBINED_TO_SCORE = {
    5: (5, -1),
    4: (4, -1),
    3: (3, -1),
    2: (2, -1),
    0: (2, -2),
    -2: (1, -2),
    -3: (1, -3),
    -4: (1, -4),
    -5: (1, -5),
    None: (4, -4),
}

WINDOW_START = dt.date(2016, 1, 4)
WINDOW_END = dt.date(2016, 12, 18)


def score_for_combined(combined: int | None) -> SentimentScore:
    return SentimentScore(*COMBINED_TO_SCORE[combined])


def make_app(
    app_id: str = "app1",
    category: str = "Games",
    price: float = 0.0,
    name: str | None = None,
) -> AppRecord:
    return AppRecord(
        app_id=app_id,
        name=name or f"App {app_id}",
        primary_category=category,
        price=price,
        current_version="1.0",
        raw_details={"trackId": app_id},
    )


def make_review(
    app_id: str,
    review_id: str,
    rating: int = 3,
    date: dt.date = WINDOW_START,
    title: str = "a title",
    body: str = "a body",
) -> Review:
    return Review(
        review_id=review_id,
        app_id=app_id,
        author=f"user-{review_id}",
        title=title,
        body=body,
        rating=rating,
        date=date,
    )


def add_scored_review(
    archive: Archive,
    app_id: str,
    review_id: str,
    combined: int | None,
    rating: int = 3,
    date: dt.date = WINDOW_START,
    title: str = "a title",
    body: str = "a body",
) -> None:
    archive.add_review(make_review(app_id, review_id, rating, date, title, body))
    archive.set_score(app_id, review_id, score_for_combined(combined))


def archive_with_combined(
    values: list[int | None],
    app_id: str = "app1",
    category: str = "Games",
    price: float = 0.0,
    ratings: list[int] | None = None,
) -> Archive:
    """One-app archive whose reviews carry exactly these combined values."""
    archive = Archive()
    archive.add_app(make_app(app_id, category, price))
    for i, combined in enumerate(values):
        rating = ratings[i] if ratings else 3
        add_scored_review(archive, app_id, f"r{i:04d}", combined, rating=rating)
    return archive


def random_archive(rng: random.Random, n_apps: int = 3, n_reviews: int = 60) -> Archive:
    """Randomized scored archive with dates across the 2016 window."""
    archive = Archive()
    categories = ["Games", "Finance", "Music", "News"]
    for a in range(n_apps):
        archive.add_app(
            make_app(
                f"app{a}",
                category=rng.choice(categories),
                price=rng.choice([0.0, 0.99, 4.99]),
            )
        )
    combined_pool = list(COMBINED_TO_SCORE)
    span = (WINDOW_END - WINDOW_START).days
    for i in range(n_reviews):
        app_id = f"app{rng.randrange(n_apps)}"
        date = WINDOW_START + dt.timedelta(days=rng.randrange(span + 1))
        add_scored_review(
            archive,
            app_id,
            f"r{i:05d}",
            rng.choice(combined_pool),
            rating=rng.randint(1, 5),
            date=date,
            title="t" * rng.randint(0, 10),
            body="b" * rng.randint(0, 200),
        )
    return archive


# review texts with a spread of seed-lexicon hits, fillers, and emojis
TEXT_POOL = [
    ("Love it", "this app is awesome and very good", 5),
    ("Great app", "works fine and looks nice", 5),
    ("Extremely good", "best tool on my phone", 5),
    ("Solid", "it opens and does the thing", 4),
    ("Nothing special", "meh whatever it runs ok", 3),
    ("Mixed feelings", "I hate that u need wifi but it is great.", 3),
    ("So annoying", "ads everywhere now", 2),
    ("Very sad", "I would be very sad without it but the update is bad", 2),
    ("I hate this", "terrible after the redesign", 1),
    ("Worst update", "broken and useless now 😡", 1),
    ("Happy 😀", "works again, love the new look", 5),
    ("Why", "slow and boring lately", 2),
]


def unscored_text_archive(
    rng: random.Random, n_apps: int = 3, n_reviews: int = 200
) -> Archive:
    """Archive of raw (unscored) reviews with real text to exercise scoring."""
    archive = Archive()
    categories = ["Games", "Finance", "News"]
    for a in range(n_apps):
        archive.add_app(
            make_app(
                f"app{a}",
                category=categories[a % len(categories)],
                price=[0.0, 0.99, 4.99][a % 3],
            )
        )
    span = (WINDOW_END - WINDOW_START).days
    for i in range(n_reviews):
        title, body, rating = TEXT_POOL[rng.randrange(len(TEXT_POOL))]
        archive.add_review(
            Review(
                review_id=f"r{i:05d}",
                app_id=f"app{rng.randrange(n_apps)}",
                author=f"user{i}",
                title=title,
                body=body,
                rating=rating,
                date=WINDOW_START + dt.timedelta(days=rng.randrange(span + 1)),
                helpful_votes=rng.randrange(3),
                app_version="1.0",
            )
        )
    return archive


# --- stub store endpoint -------------------------------------------------------

REVIEWS_PATH = re.compile(r"^/apps/([^/]+)/reviews$")


class Stub:
    """Configurable in-process store endpoint for client and CLI tests."""

    def __init__(self):
        self.app_payloads = {}  # app_id -> lookup result object
        self.review_pages = {}  # app_id -> list of pages (lists of review dicts)
        self.fail_remaining = {}  # path -> number of 500s to serve first
        self.fail_pages = {}  # path -> set of review pages that always 500
        self.requests = []
        self.base_url = ""

    def handler(self):
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _send(self, code, payload):
                body = json.dumps(payload).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                parsed = urlparse(self.path)
                stub.requests.append(self.path)
                if stub.fail_remaining.get(parsed.path, 0) > 0:
                    stub.fail_remaining[parsed.path] -= 1
                    self._send(500, {"error": "flaky"})
                    return
                if parsed.path == "/lookup":
                    app_id = parse_qs(parsed.query).get("id", [""])[0]
                    payload = stub.app_payloads.get(app_id)
                    if payload is None:
                        self._send(200, {"resultCount": 0, "results": []})
                    else:
                        self._send(200, {"resultCount": 1, "results": [payload]})
                    return
                match = REVIEWS_PATH.match(parsed.path)
                if match:
                    app_id = match.group(1)
                    page = int(parse_qs(parsed.query).get("page", ["1"])[0])
                    if page in stub.fail_pages.get(parsed.path, set()):
                        self._send(500, {"error": "broken page"})
                        return
                    pages = stub.review_pages.get(app_id, [])
                    items = pages[page - 1] if 1 <= page <= len(pages) else []
                    self._send(200, {"reviews": items, "more": page < len(pages)})
                    return
                self._send(404, {"error": "no route"})

        return Handler


def feed_item(i: int, date: str = "2016-06-01", rating: int = 4) -> dict:
    return {
        "id": f"rev-{i:04d}",
        "author": f"user{i}",
        "title": f"title {i}",
        "body": f"body {i}",
        "rating": rating,
        "date": date,
        "votes": 0,
        "version": "1.0",
    }


def lookup_payload(app_id: str, n_keys: int = 44) -> dict:
    payload = {
        "trackId": app_id,
        "trackName": f"App {app_id}",
        "primaryGenreName": "Games",
        "price": 0.0,
        "version": "2.3",
    }
    i = 0
    while len(payload) < n_keys:
        payload[f"extra_{i}"] = i
        i += 1
    return payload
