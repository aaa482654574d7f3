"""Run the laboratory with ``python -m holderlab``."""

from .cli import main

raise SystemExit(main())
