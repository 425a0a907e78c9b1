import sys
from pathlib import Path

from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

# Make tests/reference.py importable regardless of how pytest was invoked.
sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).parent / "fixtures"
