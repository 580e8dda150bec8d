import logging
import sys

from src.commands.command_manager import run

# CONFIGURATION
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, stream=sys.stderr)

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
