import json

from src.commands.command import Command
from src.data.config import schema, validate_config


class SchemaCommand(Command):
    name = "schema"
    help = "print the JSON schema of run configs"
    writes_manifest = False

    def execute(self, config, args):
        print(json.dumps(schema(), indent=2, sort_keys=True))


class ValidateConfigCommand(Command):
    name = "validate-config"
    help = "validate a run config and print its canonical form"
    writes_manifest = False

    def add_arguments(self, parser):
        parser.add_argument("path", help="config JSON file")

    def execute(self, config, args):
        _, canonical = validate_config(args.path)
        print(canonical)
