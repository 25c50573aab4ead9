import sys

from blockjacobi.cli import main

sys.exit(main())
