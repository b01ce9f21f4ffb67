import sys

from subsim.cli import main

sys.exit(main())
