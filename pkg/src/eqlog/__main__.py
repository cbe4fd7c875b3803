import sys

from eqlog.cli import main

sys.exit(main())
