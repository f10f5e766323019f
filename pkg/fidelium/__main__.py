import sys

from fidelium.main import main

sys.exit(main())
