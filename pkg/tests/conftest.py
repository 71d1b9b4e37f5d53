import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

SESSION_T0 = time.monotonic()


def session_elapsed() -> float:
    return time.monotonic() - SESSION_T0
