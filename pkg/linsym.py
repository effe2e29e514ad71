#!/usr/bin/python3

from linsym.cli import CommandLineInterface

import sys

app = CommandLineInterface()
sys.exit(app.main())
