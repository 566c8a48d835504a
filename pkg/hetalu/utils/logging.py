import logging
import os
import sys
from pathlib import Path


def setup_logging():
    """Configure logging for the application."""
    log_level = os.getenv('LOG_LEVEL', 'WARNING').upper()
    log_file = os.getenv('LOG_FILE_PATH')

    # stdout is reserved for report output (--out -)
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, log_level, logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )

    logging.getLogger('numexpr').setLevel(logging.WARNING)
