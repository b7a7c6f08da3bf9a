"""
Database module for the BSC four-codeword toolkit
Caches analytic spectra and stores verifier reports in sqlite
"""

import json
import sqlite3
from datetime import datetime
from typing import Dict, List, Optional

import config

# Database configuration
DATABASE = config.DATABASE

def get_db_connection():
    """Get a database connection."""
    conn = sqlite3.connect(DATABASE)
    conn.row_factory = sqlite3.Row  # column access by name
    return conn

def init_database():
    """Initialize the database with required tables."""
    conn = get_db_connection()

    # Spectra keyed by canonical profile text; alpha is a JSON list of decimal strings
    conn.execute('''
        CREATE TABLE IF NOT EXISTS spectra (
            profile TEXT PRIMARY KEY,
            n INTEGER NOT NULL,
            alpha TEXT NOT NULL
        )
    ''')

    conn.execute('''
        CREATE TABLE IF NOT EXISTS reports (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            n INTEGER NOT NULL,
            verdict TEXT NOT NULL,
            profiles_checked INTEGER NOT NULL,
            payload TEXT NOT NULL,
            created_at TEXT NOT NULL
        )
    ''')

    conn.commit()
    conn.close()

# Helper Functions for Database Operations

def get_spectrum_by_profile(profile: str) -> Optional[Dict]:
    """Get a cached spectrum by canonical profile text."""
    conn = get_db_connection()
    try:
        row = conn.execute('SELECT * FROM spectra WHERE profile = ?', (profile,)).fetchone()
    except sqlite3.Error:
        row = None
    conn.close()
    if not row:
        return None
    return {'profile': row['profile'], 'n': row['n'], 'alpha': [int(a) for a in json.loads(row['alpha'])]}

def insert_spectrum(profile: str, n: int, alpha: List[int]) -> bool:
    """Insert a spectrum; an existing entry for the profile is left alone."""
    conn = get_db_connection()
    try:
        conn.execute('''
            INSERT OR IGNORE INTO spectra (profile, n, alpha)
            VALUES (?, ?, ?)
        ''', (profile, n, json.dumps([str(a) for a in alpha])))
        conn.commit()
        conn.close()
        return True
    except sqlite3.Error:
        conn.close()
        return False

def insert_report(n: int, verdict: str, profiles_checked: int, payload: Dict) -> bool:
    """Insert a verifier report."""
    conn = get_db_connection()
    try:
        conn.execute('''
            INSERT INTO reports (n, verdict, profiles_checked, payload, created_at)
            VALUES (?, ?, ?, ?, ?)
        ''', (n, verdict, profiles_checked, json.dumps(payload), datetime.now().isoformat()))
        conn.commit()
        conn.close()
        return True
    except sqlite3.Error:
        conn.close()
        return False

def _report_row(row) -> Dict:
    return {
        'id': row['id'],
        'n': row['n'],
        'verdict': row['verdict'],
        'profiles_checked': row['profiles_checked'],
        'payload': json.loads(row['payload']),
        'created_at': row['created_at'],
    }

def get_reports_for_n(n: int) -> List[Dict]:
    """Get stored reports for one block length, newest first."""
    conn = get_db_connection()
    rows = conn.execute('SELECT * FROM reports WHERE n = ? ORDER BY id DESC', (n,)).fetchall()
    conn.close()
    return [_report_row(row) for row in rows]

def get_all_reports() -> List[Dict]:
    """Get every stored report ordered by block length."""
    conn = get_db_connection()
    rows = conn.execute('SELECT * FROM reports ORDER BY n, id').fetchall()
    conn.close()
    return [_report_row(row) for row in rows]
