from .kinematics import *
from .frames import *
from .normalize import *
from .stream import *
