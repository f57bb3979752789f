# Command handlers of the CLI
