from collections import OrderedDict
import configparser
import logging
import os
import re

from xdg.BaseDirectory import xdg_config_home

from linsym.common import NAME

logger = logging.getLogger(__name__)

# Sane defaults per computation mode.  Patterns are matched against the
# mode name; the `_priority` 0 pattern is the base layer and the first
# other match is applied on top of it.

DEFAULT = {
    r'(?P<mode>exact)$': {
        'tolerance': '0',
    },
    r'(?P<mode>numeric)$': {
        'tolerance': '1e-9',
    },
    r'(?P<mode>.*)$': {
        'samples': '20',
        'seed': '0',
        'tolerance': '1e-9',
        'agreement-tolerance': '1e-12',
        'span-tolerance': '1e-8',
        'cluster-tolerance': '1e-9',
        'frequency-tolerance': '1e-12',
        'fd-step': '1e-5',
        'fd-tolerance': '1e-4',
        'scan-min-n': '2',
        'scan-max-n': '8',
        '_priority': '0',  # Apply defaults first
    },
}

MODES = ('exact', 'numeric')

#
# You can overwrite the DEFAULT in the configuration file
# ($XDG_CONFIG_HOME/linsym/linsymrc or $LINSYM_CONFIG).  For example, to
# tighten numeric verification add a section like this:
#
# [numeric]
#
# tolerance = 1e-11
# samples = 50
#


def default_conf_file():
    return os.environ.get('LINSYM_CONFIG', os.path.join(xdg_config_home, NAME, NAME + 'rc'))


class Config(object):
    """Helper class to configuration file."""

    def __init__(self, mode='exact', conf_file=None):
        if mode not in MODES:
            raise ValueError('unknown mode {}'.format(mode))
        self.mode = mode
        self.conf_file = os.path.expanduser(conf_file or default_conf_file())

        # Populate the configuration dictionary
        self.values = self.populate_conf()

    def populate_conf(self):
        """Layer the defaults and the configuration file section for the mode."""
        defaults = {}
        default_ordered = OrderedDict(sorted(DEFAULT.items(), key=lambda i: int(i[1].get('_priority', 99))))
        for mode_pattern in default_ordered:
            if re.match(mode_pattern, self.mode):
                for k, v in DEFAULT[mode_pattern].items():
                    if k.startswith('_'):
                        continue
                    defaults[k] = v
                if int(DEFAULT[mode_pattern].get('_priority', 99)) != 0:
                    break

        return self.read_section(self.mode, defaults)

    def read_section(self, section, defaults):
        cp = configparser.ConfigParser(defaults=defaults)
        read = cp.read(self.conf_file)
        if read:
            logger.debug('configuration read from %s', self.conf_file)
        if cp.has_section(section):
            return dict(cp.items(section))
        else:
            return defaults

    def get(self, key, default=None):
        return self.values.get(key, default)

    def getint(self, key):
        return int(self.values[key])

    def getfloat(self, key):
        return float(self.values[key])

    def override(self, **kwargs):
        """Apply command line overrides; None values are ignored."""
        for key, value in kwargs.items():
            if value is not None:
                self.values[key.replace('_', '-')] = str(value)
