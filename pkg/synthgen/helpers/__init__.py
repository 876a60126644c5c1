from .profiles import *
from .trajectory import *
from .corpus import *
