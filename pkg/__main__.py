"""CEP pricing engine entry point.

Usage: python . <spreads|netzero|permanence|termsheet|sanity|ingest> [options]
"""

from cli import main

if __name__ == "__main__":
    raise SystemExit(main())
