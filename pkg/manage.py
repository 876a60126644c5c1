#!/usr/bin/env python
"""mousetrust command-line entry point.

Subcommands: simulate, extract, train, eval, experiment, auth-stream (alias auth_stream), report.
Run `python manage.py help <subcommand>` for the flags of each one.
"""
import os
import sys


def main():
    """Run mousetrust subcommands."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'mousetrust_project.settings')

    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Are you sure it's installed and "
            "available on your PYTHONPATH environment variable? Did you "
            "forget to activate a virtual environment?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
