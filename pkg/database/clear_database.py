"""
fanforge - Clear Database Script
Deletes every stored certificate and keeps the schema.
WARNING: This will delete ALL certificates!
"""

import sqlite3
import sys
from pathlib import Path

# Database configuration
DB_DIR = Path(__file__).parent
DB_PATH = DB_DIR / "fanforge.db"


def count_certificates(db_path: Path = DB_PATH):
    """Number of stored certificates, or None when the store is missing."""
    if not db_path.exists():
        return None
    try:
        conn = sqlite3.connect(db_path)
        count = conn.execute("SELECT COUNT(*) FROM certificates").fetchone()[0]
        conn.close()
        return count
    except sqlite3.Error as e:
        print(f"[ERROR] Could not read database: {e}")
        return None


def clear_database(db_path: Path = DB_PATH, force: bool = False) -> bool:
    """
    Empty the certificates table.

    Args:
        db_path: Location of the SQLite file
        force: If True, skip confirmation prompt
    """
    count = count_certificates(db_path)
    if count is None:
        print(f"[INFO] No certificate store at {db_path}. Run init_db.py to create one.")
        return True

    print(f"[INFO] {db_path}: {count} certificates")
    if not force:
        confirmation = input("Type 'DELETE' to confirm (or anything else to cancel): ").strip()
        if confirmation != "DELETE":
            print("[INFO] Operation cancelled. Database was not modified.")
            return False

    try:
        conn = sqlite3.connect(db_path)
        conn.execute("DELETE FROM certificates")
        conn.execute("DELETE FROM sqlite_sequence WHERE name = 'certificates'")
        conn.commit()
        conn.close()
    except sqlite3.Error as e:
        print(f"[ERROR] Database error: {e}")
        return False

    print(f"[SUCCESS] Deleted {count} certificates")
    return True


if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] in ("--help", "-h"):
        print("Usage: python database/clear_database.py [--force]")
        sys.exit(0)
    force = len(sys.argv) > 1 and sys.argv[1] in ("--force", "-f")
    sys.exit(0 if clear_database(force=force) else 1)
