import sys

from qcsim.cli import main

sys.exit(main())
