from __future__ import annotations

from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"

SAMPLE_FILES = {
    "minimum_wage_studies": DATA_DIR / "minimum_wage_template.csv",
    "minimum_wage_config": DATA_DIR / "minimum_wage_config.json",
}


@pytest.fixture(scope="session")
def sample_files() -> dict[str, Path]:
    for key, path in SAMPLE_FILES.items():
        if not path.exists():
            raise FileNotFoundError(f"Missing sample file [{key}]: {path}")
    return SAMPLE_FILES


@pytest.fixture(scope="session")
def minimum_wage(sample_files):
    from metatrace.config import parse_config_json
    from metatrace.studies_csv import parse_studies_csv

    return (
        parse_studies_csv(sample_files["minimum_wage_studies"]),
        parse_config_json(sample_files["minimum_wage_config"]),
    )
