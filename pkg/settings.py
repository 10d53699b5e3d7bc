import os
from pathlib import Path

BASE_DIR = Path(os.path.dirname(os.path.abspath(__file__)))

# HTTP API
PORT = int(os.environ.get('PORT', 5000))
REQUEST_TIMEOUT = int(os.environ.get('REQUEST_TIMEOUT', 300))  # seconds

OUTPUT_DIR = Path(os.environ.get('GEOTHERMAL_OUTPUT_DIR', BASE_DIR / 'pipeline_output'))
SAMPLE_PROJECTS_DIR = BASE_DIR / 'sample_projects'

LOG_LEVEL = os.environ.get('GEOTHERMAL_LOG_LEVEL', 'INFO').upper()
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# Monte Carlo
DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 20240601
DEFAULT_WORKERS = int(os.environ.get('GEOTHERMAL_WORKERS', 1))
HISTOGRAM_BINS = 50
MAX_FAILED_FRACTION = 0.5


def color_enabled(stream):
    """Tables are colored only on a terminal and when NO_COLOR is unset."""
    if 'NO_COLOR' in os.environ:
        return False
    return hasattr(stream, 'isatty') and stream.isatty()
