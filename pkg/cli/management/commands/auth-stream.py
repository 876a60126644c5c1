# `manage.py auth-stream` is the same command as `manage.py auth_stream`
from .auth_stream import Command

__all__ = ['Command']
