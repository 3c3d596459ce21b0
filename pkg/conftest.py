"""
Pytest configuration for bflyflow tests.

This file configures pytest-django and provides global fixtures.
"""

import os
import sys
from pathlib import Path

import django
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))


def pytest_configure(config):
    """
    Configure Django settings for pytest.

    This runs before any tests are collected.
    """
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    django.setup()


@pytest.fixture
def output_dir(tmp_path, settings):
    """
    Point BMO_OUTPUT_DIR at a per-test temporary directory.

    Commands that fall back to the default output directory never write
    into the working tree during tests.
    """
    out = tmp_path / "runs"
    settings.BMO_OUTPUT_DIR = out
    return out
