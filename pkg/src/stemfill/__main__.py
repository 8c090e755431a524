import sys

from stemfill.cli import main

sys.exit(main())
