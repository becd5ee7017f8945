import sys

from vulnrank.cli import main

sys.exit(main())
