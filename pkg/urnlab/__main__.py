import sys

from urnlab.main import main

sys.exit(main())
