"""Entry point for python -m hetalu."""
import sys

from hetalu.cli import main
from hetalu.utils.logging import setup_logging

setup_logging()
sys.exit(main())
