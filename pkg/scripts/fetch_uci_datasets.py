#!/usr/bin/env python3
"""Fetch the genuine heart-disease collections and install them in data/.

Downloads the three processed files from the UCI repository, checks
their shapes (303, 294, and 123 records of 14 fields), and writes them
over the synthetic fixtures as cleveland.csv, hungarian.csv, and
swiss.csv. Run it once from the repository root when network access is
available:

    python3 scripts/fetch_uci_datasets.py [--out-dir data]
"""

from __future__ import annotations

import argparse
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases/heart-disease"

SOURCES = {
    "cleveland": ("processed.cleveland.data", 303),
    "hungarian": ("processed.hungarian.data", 294),
    "swiss": ("processed.switzerland.data", 123),
}


def fetch(name: str, filename: str, expected_rows: int) -> str:
    url = f"{BASE}/{filename}"
    print(f"fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        text = response.read().decode("ascii", errors="strict")
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) != expected_rows:
        raise SystemExit(f"{name}: expected {expected_rows} records, got {len(lines)}")
    for number, line in enumerate(lines, start=1):
        fields = line.split(",")
        if len(fields) != 14:
            raise SystemExit(f"{name}:{number}: expected 14 fields, got {len(fields)}")
    return "\n".join(lines) + "\n"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="data", help="output directory")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (filename, expected_rows) in SOURCES.items():
        text = fetch(name, filename, expected_rows)
        path = out_dir / f"{name}.csv"
        path.write_text(text, encoding="ascii")
        print(f"wrote {path} ({expected_rows} rows)")
    print("done; the synthetic fixtures have been replaced")


if __name__ == "__main__":
    main()
