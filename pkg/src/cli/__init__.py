# Command-line surface: parser, config loading and subcommand handlers
