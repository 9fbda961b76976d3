"""
DataTriage - data-quality validation, classification and triage.
Entry point for the command-line tool.
"""

import sys

from app import run_command

if __name__ == "__main__":
    sys.exit(run_command())
