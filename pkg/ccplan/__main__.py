import sys

from ccplan.harness.cli import main

sys.exit(main())
