import sys

from kltbench.cli import main

sys.exit(main())
