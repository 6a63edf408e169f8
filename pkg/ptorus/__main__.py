# ptorus/__main__.py

import sys

from ptorus.main import main

sys.exit(main())
