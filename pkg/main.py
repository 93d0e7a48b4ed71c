import sys
import logging
from typing import List, Optional

import click

from cache_manager import log_cache_metrics
from config import MulffsConfig
from main_commands import EXIT_OK, EXIT_USAGE, cli, error_response


class CommandLineApp:
    def __init__(self):
        self.logger = self._setup_logger()

    def _setup_logger(self) -> logging.Logger:
        # Module loggers are named after their flat modules, so handlers live on the root.
        root = logging.getLogger()
        if not root.handlers:
            root.setLevel(MulffsConfig.LOG_LEVEL)
            formatter = logging.Formatter(MulffsConfig.LOG_FORMAT)

            console_handler = logging.StreamHandler(sys.stderr)
            console_handler.setFormatter(formatter)
            root.addHandler(console_handler)

            if MulffsConfig.LOG_FILE:
                file_handler = logging.FileHandler(MulffsConfig.LOG_FILE)
                file_handler.setFormatter(formatter)
                root.addHandler(file_handler)

        return logging.getLogger("mulffs")

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            rv = cli.main(args=argv, prog_name="mulffs", standalone_mode=False)
        except (click.ClickException, click.exceptions.Abort) as e:
            return error_response(e, EXIT_USAGE)
        finally:
            self.shutdown()
        return rv if isinstance(rv, int) else EXIT_OK

    def shutdown(self):
        log_cache_metrics()
        self.logger.debug("mulffs finished")


def main():
    sys.exit(CommandLineApp().run())


if __name__ == "__main__":
    main()
