import sys

from src.threepoint.cli import main

sys.exit(main())
