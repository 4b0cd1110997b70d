"""Run the acceptance suite and show the per-criterion lines."""

import sys
from pathlib import Path

import pytest

root = Path(__file__).resolve().parents[1]
sys.exit(pytest.main([str(root / "tests" / "test_acceptance.py"), "-q", "-rN", *sys.argv[1:]]))
