import sys

from relfuzz.main import main

sys.exit(main())
