import sys

from bellopt.cli import main

sys.exit(main())
