#!/usr/bin/env python3
"""Entry point for ``python3 -m horokit``."""

import sys

from horokit.cli import main

if __name__ == '__main__':
    sys.exit(main())
