#!/usr/bin/env python3
"""
Fusion Toolkit command-line entry point
"""

import sys
import logging

# Load environment variables
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # dotenv not available, environment should be set manually

from fusionkit.cli import run
from fusionkit.fusion_config import get_fusion_config


def main() -> int:
    level = get_fusion_config().get("logging", "level")
    if "--verbose" in sys.argv[1:]:
        level = "DEBUG"
    logging.basicConfig(level=getattr(logging, str(level).upper(), logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s",
                        stream=sys.stderr)
    return run(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
