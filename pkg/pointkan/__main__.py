import sys

from pointkan import main

if __name__ == '__main__':
    sys.exit(main.run_standalone())
