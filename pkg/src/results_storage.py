# -*- coding: utf-8 -*-
"""
Results Storage Module
Atomic artifact writes plus SQLite/CSV persistence of sweep rows and validation summaries
"""

import io
import os
import csv
import json
import sqlite3
import logging
import tempfile
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

SWEEP_FIELDS = ['alpha', 'beta', 'theta', 'dim', 'm', 'j_value', 'd_phs']


def atomic_write_text(path: str, text: str) -> None:
    """Write through a temporary file in the target directory, then rename over the target"""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, 'w', newline='') as handle:
            handle.write(text)
        os.replace(tmp_path, target)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def to_json(record) -> str:
    return json.dumps(record, sort_keys=True, indent=2) + "\n"


def to_csv(rows: Sequence[Dict], fieldnames: Optional[List[str]] = None) -> str:
    """Render dict rows as CSV text"""
    rows = list(rows)
    if fieldnames is None:
        fieldnames = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


class ResultsStorage:
    """Persists parameter-sweep rows and validation summaries"""

    def __init__(self, storage_type: str = "sqlite", base_path: str = "."):
        self.storage_type = storage_type.lower()
        self.base_path = base_path
        self.logger = logging.getLogger(__name__)

        if self.storage_type not in ("sqlite", "csv"):
            raise ValueError(f"unknown storage type {storage_type!r}")

        self.data_dir = Path(self.base_path) / "data"
        self.data_dir.mkdir(parents=True, exist_ok=True)

        if self.storage_type == "sqlite":
            self.db_path = str(Path(self.base_path) / "results.db")
            self._init_database()

    def _init_database(self):
        """Create tables if missing"""
        try:
            with sqlite3.connect(self.db_path) as conn:
                cursor = conn.cursor()
                cursor.execute('''
                    CREATE TABLE IF NOT EXISTS sweep_rows (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        run_label TEXT NOT NULL,
                        alpha REAL NOT NULL,
                        beta REAL NOT NULL,
                        theta REAL NOT NULL,
                        dim INTEGER NOT NULL,
                        m REAL NOT NULL,
                        j_value REAL NOT NULL,
                        d_phs REAL NOT NULL,
                        UNIQUE(run_label, alpha, beta, theta, dim)
                    )
                ''')
                cursor.execute('''
                    CREATE TABLE IF NOT EXISTS validation_runs (
                        id INTEGER PRIMARY KEY AUTOINCREMENT,
                        suite TEXT NOT NULL,
                        seed INTEGER NOT NULL,
                        passed INTEGER NOT NULL,
                        failed INTEGER NOT NULL,
                        report_path TEXT,
                        recorded_at DATETIME NOT NULL
                    )
                ''')
                cursor.execute('CREATE INDEX IF NOT EXISTS idx_sweep_label ON sweep_rows(run_label)')
                conn.commit()
                self.logger.info("Results database initialized")
        except sqlite3.Error as e:
            self.logger.error(f"Database initialization failed: {e}")
            raise

    def store_sweep_rows(self, run_label: str, rows: List[Dict]) -> bool:
        """Store sweep rows; repeated (label, profile) rows are replaced"""
        if not rows:
            return True
        try:
            if self.storage_type == "sqlite":
                return self._store_sweep_sqlite(run_label, rows)
            return self._store_sweep_csv(run_label, rows)
        except (sqlite3.Error, OSError) as e:
            self.logger.error(f"Failed to store sweep rows: {e}")
            return False

    def _store_sweep_sqlite(self, run_label: str, rows: List[Dict]) -> bool:
        with sqlite3.connect(self.db_path) as conn:
            cursor = conn.cursor()
            for row in rows:
                cursor.execute('''
                    INSERT OR REPLACE INTO sweep_rows
                    (run_label, alpha, beta, theta, dim, m, j_value, d_phs)
                    VALUES (?, ?, ?, ?, ?, ?, ?, ?)
                ''', (run_label, *(row[name] for name in SWEEP_FIELDS)))
            conn.commit()
        self.logger.info(f"Stored {len(rows)} sweep rows under '{run_label}' in database")
        return True

    def _store_sweep_csv(self, run_label: str, rows: List[Dict]) -> bool:
        csv_path = self.data_dir / f"sweep_{run_label}.csv"
        atomic_write_text(str(csv_path), to_csv([{k: row[k] for k in SWEEP_FIELDS} for row in rows],
                                                SWEEP_FIELDS))
        self.logger.info(f"Stored {len(rows)} sweep rows in {csv_path}")
        return True

    def get_sweep_rows(self, run_label: str) -> List[Dict]:
        """Rows of a sweep in theta order"""
        try:
            if self.storage_type == "sqlite":
                with sqlite3.connect(self.db_path) as conn:
                    conn.row_factory = sqlite3.Row
                    cursor = conn.cursor()
                    cursor.execute(
                        'SELECT alpha, beta, theta, dim, m, j_value, d_phs FROM sweep_rows '
                        'WHERE run_label = ? ORDER BY dim, alpha, beta, theta', (run_label,))
                    return [dict(row) for row in cursor.fetchall()]

            csv_path = self.data_dir / f"sweep_{run_label}.csv"
            if not csv_path.exists():
                return []
            with open(csv_path, 'r', newline='') as handle:
                rows = []
                for row in csv.DictReader(handle):
                    parsed = {k: float(v) for k, v in row.items()}
                    parsed['dim'] = int(parsed['dim'])
                    rows.append(parsed)
                return rows
        except (sqlite3.Error, OSError, ValueError) as e:
            self.logger.error(f"Failed to read sweep rows: {e}")
            return []

    def store_validation_summary(self, suite: str, seed: int, passed: int, failed: int,
                                 report_path: Optional[str] = None) -> bool:
        """Append a validation-run summary (timestamps live here, never in the report itself)"""
        recorded_at = datetime.now().isoformat(timespec='seconds')
        try:
            if self.storage_type == "sqlite":
                with sqlite3.connect(self.db_path) as conn:
                    conn.execute('''
                        INSERT INTO validation_runs (suite, seed, passed, failed, report_path, recorded_at)
                        VALUES (?, ?, ?, ?, ?, ?)
                    ''', (suite, seed, passed, failed, report_path, recorded_at))
                    conn.commit()
            else:
                csv_path = self.data_dir / "validation_runs.csv"
                file_exists = csv_path.exists()
                with open(csv_path, 'a', newline='') as handle:
                    writer = csv.DictWriter(handle, fieldnames=['suite', 'seed', 'passed', 'failed',
                                                                'report_path', 'recorded_at'])
                    if not file_exists:
                        writer.writeheader()
                    writer.writerow({'suite': suite, 'seed': seed, 'passed': passed, 'failed': failed,
                                     'report_path': report_path or '', 'recorded_at': recorded_at})
            self.logger.info(f"Recorded validation run '{suite}' ({passed} passed, {failed} failed)")
            return True
        except (sqlite3.Error, OSError) as e:
            self.logger.error(f"Failed to record validation run: {e}")
            return False
