import sys

from dotenv import load_dotenv

from ned.cli import main

# ========== environment ==========
try:
    load_dotenv()
except Exception:
    pass

if __name__ == "__main__":
    sys.exit(main())
