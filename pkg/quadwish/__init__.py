# quadwish/__init__.py

from quadwish.config import get_settings
from quadwish.log import get_logger
from quadwish.__version__ import __version__
