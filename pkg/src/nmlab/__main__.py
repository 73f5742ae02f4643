import sys

from nmlab.app_nmlab.app_nmlab import main

if __name__ == "__main__":
    sys.exit(main())
