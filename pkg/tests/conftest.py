from .fixtures import *  # pylint: disable=wildcard-import,unused-wildcard-import,wrong-import-position
