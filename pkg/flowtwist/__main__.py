import sys

from flowtwist.cli import main

sys.exit(main())
