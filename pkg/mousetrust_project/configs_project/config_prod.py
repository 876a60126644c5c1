DEBUG = False

# Logging configurations
log_to_file = True
log_to_terminal = False
log_level = 'INFO'

# Run defaults (overridable via MOUSETRUST_* in .env)
DEFAULT_SEED = 0
DEFAULT_WORKERS = 4
