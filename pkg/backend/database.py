"""
Database connection and operations for fanforge
Stores certificates produced through the HTTP surface.
"""

import aiosqlite
from pathlib import Path
from typing import Optional, Dict, List
import json
import logging

from .config import settings

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).parent.parent / "database" / "schema.sql"


class Database:
    """Async SQLite database manager"""

    def __init__(self, db_path: Path = settings.DATABASE_PATH):
        self.db_path = db_path
        self._connection: Optional[aiosqlite.Connection] = None

    async def connect(self):
        """Establish database connection and make sure the schema exists"""
        Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)
        self._connection = await aiosqlite.connect(str(self.db_path))
        self._connection.row_factory = aiosqlite.Row
        await self._connection.executescript(SCHEMA_PATH.read_text(encoding="utf-8"))
        logger.info(f"Connected to database: {self.db_path}")

    async def disconnect(self):
        """Close database connection"""
        if self._connection:
            await self._connection.close()
            self._connection = None
            logger.info("Disconnected from database")

    async def execute(self, query: str, params: tuple = ()) -> aiosqlite.Cursor:
        """Execute a query"""
        cursor = await self._connection.execute(query, params)
        await self._connection.commit()
        return cursor

    async def fetch_one(self, query: str, params: tuple = ()) -> Optional[Dict]:
        """Fetch single row"""
        cursor = await self._connection.execute(query, params)
        row = await cursor.fetchone()
        return dict(row) if row else None

    async def fetch_all(self, query: str, params: tuple = ()) -> List[Dict]:
        """Fetch all rows"""
        cursor = await self._connection.execute(query, params)
        rows = await cursor.fetchall()
        return [dict(row) for row in rows]

    # Certificate operations
    async def save_certificate(self, result: Dict) -> int:
        """Store a machine-readable certificate result; returns its id"""
        query = """
            INSERT INTO certificates (target, field, depth, verdict, counts, witness_mtx, trace, result)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?)
        """
        cursor = await self.execute(
            query,
            (result.get("target", ""), result["field"], result["depth"], result["verdict"],
             json.dumps(result["counts"]), result.get("witness_mtx"),
             "\n".join(result.get("trace", [])), json.dumps(result))
        )
        return cursor.lastrowid

    async def get_certificate(self, certificate_id: int) -> Optional[Dict]:
        """Get certificate by ID, with counts and the full result decoded"""
        row = await self.fetch_one("SELECT * FROM certificates WHERE id = ?", (certificate_id,))
        if row:
            row["counts"] = json.loads(row["counts"])
            row["result"] = json.loads(row["result"])
        return row

    async def list_certificates(self, limit: int = 50) -> List[Dict]:
        """Most recent certificates first, without the stored result blob"""
        query = """
            SELECT id, created_at, target, field, depth, verdict, counts
            FROM certificates ORDER BY id DESC LIMIT ?
        """
        rows = await self.fetch_all(query, (limit,))
        for row in rows:
            row["counts"] = json.loads(row["counts"])
        return rows


# Global database instance
db = Database()
