import sys

from mixreg.cli.main import main

sys.exit(main())
