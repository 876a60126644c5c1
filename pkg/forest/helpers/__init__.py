from .config import *
from .tree import *
from .ensemble import *
