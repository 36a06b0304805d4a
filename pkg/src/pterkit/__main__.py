import sys

from pterkit.cli import main

sys.exit(main())
