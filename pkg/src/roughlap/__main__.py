import sys

from roughlap.cli import main

sys.exit(main())
