"""Embedded persistence: JSON documents in SQLite plus an append-only exchange log.

Scaled for a course pilot, not a fleet: one writer at a time, any number of
readers, everything serialized through a process-local lock. Documents live
in named collections keyed by id; LLM exchanges go to a log table that only
ever grows.
"""

from __future__ import annotations

import json
import sqlite3
import threading


class DocumentStore:
    def __init__(self, path: str = ":memory:"):
        self._conn = sqlite3.connect(path, check_same_thread=False)
        self._lock = threading.RLock()
        with self._lock:
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS documents ("
                " seq INTEGER PRIMARY KEY AUTOINCREMENT,"
                " collection TEXT NOT NULL,"
                " id TEXT NOT NULL,"
                " body TEXT NOT NULL,"
                " UNIQUE (collection, id))"
            )
            self._conn.execute(
                "CREATE TABLE IF NOT EXISTS exchanges ("
                " seq INTEGER PRIMARY KEY AUTOINCREMENT,"
                " id TEXT NOT NULL UNIQUE,"
                " body TEXT NOT NULL)"
            )
            self._conn.commit()

    def put(self, collection: str, doc_id: str, doc: dict) -> None:
        body = json.dumps(doc)
        with self._lock:
            self._conn.execute(
                "INSERT INTO documents (collection, id, body) VALUES (?, ?, ?)"
                " ON CONFLICT (collection, id) DO UPDATE SET body = excluded.body",
                (collection, doc_id, body),
            )
            self._conn.commit()

    def get(self, collection: str, doc_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT body FROM documents WHERE collection = ? AND id = ?",
                (collection, doc_id),
            ).fetchone()
        return json.loads(row[0]) if row else None

    def list(self, collection: str) -> list[dict]:
        """All documents in a collection, oldest first."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT body FROM documents WHERE collection = ? ORDER BY seq",
                (collection,),
            ).fetchall()
        return [json.loads(row[0]) for row in rows]

    def append_exchange(self, exchange_id: str, doc: dict) -> int:
        """Append to the audit log; existing entries are never touched."""
        body = json.dumps(doc)
        with self._lock:
            cursor = self._conn.execute(
                "INSERT INTO exchanges (id, body) VALUES (?, ?)", (exchange_id, body)
            )
            self._conn.commit()
        return int(cursor.lastrowid)

    def exchange(self, exchange_id: str) -> dict | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT body FROM exchanges WHERE id = ?", (exchange_id,)
            ).fetchone()
        return json.loads(row[0]) if row else None

    def exchanges(self) -> list[dict]:
        with self._lock:
            rows = self._conn.execute("SELECT body FROM exchanges ORDER BY seq").fetchall()
        return [json.loads(row[0]) for row in rows]

    def dump_bytes(self) -> bytes:
        """Entire store contents as bytes, for leak scanning in tests."""
        with self._lock:
            chunks = [row[0] for row in self._conn.execute("SELECT body FROM documents")]
            chunks += [row[0] for row in self._conn.execute("SELECT body FROM exchanges")]
        return "\n".join(chunks).encode("utf-8")

    def close(self) -> None:
        with self._lock:
            self._conn.close()
