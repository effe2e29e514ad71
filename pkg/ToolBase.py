#!/usr/bin/python3

import cmdln
import logging
import os
import sys

from linsym.common import VERSION
from linsym.conf import Config

logger = logging.getLogger()

LOG_LEVEL_VARIABLE = 'LINSYM_LOG_LEVEL'


class ToolBase(object):
    def __init__(self, conf_file=None):
        self.conf_file = conf_file

    def config(self, mode='exact', **overrides):
        """Layered configuration for a computation mode with command line overrides on top."""
        config = Config(mode, self.conf_file)
        config.override(**overrides)
        return config


def environment_log_level():
    name = os.environ.get(LOG_LEVEL_VARIABLE)
    if not name:
        return None
    level = logging.getLevelName(name.upper())
    if not isinstance(level, int):
        logger.warning('ignoring unknown log level %s=%s', LOG_LEVEL_VARIABLE, name)
        return None
    return level


class CommandLineInterface(cmdln.Cmdln):
    version = VERSION

    def __init__(self, *args, **kwargs):
        cmdln.Cmdln.__init__(self, *args, **kwargs)

    def get_optparser(self):
        parser = cmdln.Cmdln.get_optparser(self)
        parser.add_option("-d", "--debug", action="store_true", help="debug output")
        parser.add_option("--verbose", action="store_true", help="verbose")
        parser.add_option("-c", "--config", metavar="FILE", help="configuration file")

        return parser

    def postoptparse(self):
        level = None
        if (self.options.debug):
            level = logging.DEBUG
        elif (self.options.verbose):
            level = logging.INFO
        else:
            level = environment_log_level()

        logging.basicConfig(level=level)

        self.tool = self.setup_tool()

    def setup_tool(self, toolclass=ToolBase):
        """ reimplement this """

        tool = toolclass(self.options.config)

        return tool


if __name__ == "__main__":
    app = CommandLineInterface()
    sys.exit(app.main())
