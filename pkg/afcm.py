#!/usr/bin/env python3
"""
AFCM - adaptive random feature PDE experiments
Entry point for the command-line interface
"""
import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent / 'src'))

from app.cli import main

if __name__ == '__main__':
    sys.exit(main())
