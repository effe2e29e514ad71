import subprocess
from os import path

NAME = 'linsym'


def version_calculate():
    if path.exists('.git'):
        try:
            ret = subprocess.run(
                ['git', 'show', '--no-patch', '--date=short', '--format=%cd.%h'],
                stdin=subprocess.PIPE, stdout=subprocess.PIPE, universal_newlines=True)
            ret.check_returncode()
            return ret.stdout.strip().replace('-', '')
        except (FileNotFoundError, subprocess.CalledProcessError):
            pass  # Fall through to final return.

    return '0.0.0-dev'


VERSION = version_calculate()
