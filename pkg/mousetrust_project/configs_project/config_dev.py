DEBUG = True

# Logging configurations
log_to_file = False
log_to_terminal = True
log_level = 'DEBUG'

# Run defaults (overridable via MOUSETRUST_* in .env)
DEFAULT_SEED = 0
DEFAULT_WORKERS = 1
