"""
fanforge - Database Initialization Script
This script creates the SQLite certificate store from schema.sql.
"""

import os
import sqlite3
from pathlib import Path

# Database configuration
DB_DIR = Path(__file__).parent
DB_PATH = DB_DIR / "fanforge.db"
SCHEMA_PATH = DB_DIR / "schema.sql"


def init_database(db_path: Path = DB_PATH) -> bool:
    """Initialize the database with schema from schema.sql"""

    print(f"[DATABASE] Initializing fanforge certificate store...")
    print(f"[DATABASE] Location: {db_path}")

    if not SCHEMA_PATH.exists():
        print(f"[ERROR] Schema file not found at {SCHEMA_PATH}")
        return False

    try:
        conn = sqlite3.connect(db_path)
        cursor = conn.cursor()
        cursor.executescript(SCHEMA_PATH.read_text(encoding="utf-8"))
        conn.commit()

        cursor.execute("SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite_%';")
        tables = cursor.fetchall()

        print(f"[SUCCESS] Database initialized successfully!")
        print(f"[INFO] Created {len(tables)} tables:")
        for table in tables:
            print(f"   - {table[0]}")

        conn.close()
        return True

    except sqlite3.Error as e:
        print(f"[ERROR] Database error: {e}")
        return False


def reset_database(db_path: Path = DB_PATH) -> bool:
    """Delete existing database and reinitialize"""
    if db_path.exists():
        print(f"[WARNING] Deleting existing database at {db_path}")
        os.remove(db_path)
    return init_database(db_path)


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1 and sys.argv[1] == "--reset":
        reset_database()
    else:
        init_database()
