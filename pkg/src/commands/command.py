import os
from abc import ABC, abstractmethod

from src.data.storage import write_csv, write_json

FIELD_HEADER = ("layer", "n_x", "n_y", "re", "im")


class Command(ABC):
    """One subcommand: its flags, and the computation that writes artifacts."""

    name = None
    help = ""
    # config overrides this command exposes as --flags
    flags = ()
    writes_manifest = True

    def __init__(self, command_manager):
        self.command_manager = command_manager
        self.artifacts = []

    def add_arguments(self, parser):
        """Extra positional arguments or switches. Can be overridden."""
        pass

    @abstractmethod
    def execute(self, config, args):
        """Run the computation for a validated RunConfig and write artifacts under config.out."""
        pass

    def setup(self):
        self.artifacts = []

    def cleanup(self):
        self.artifacts = []

    def path(self, config, filename):
        return os.path.join(config.out, filename)

    def csv(self, config, filename, header, rows):
        p = self.path(config, filename)
        write_csv(p, header, rows)
        self.artifacts.append(p)
        return p

    def json(self, config, filename, payload):
        p = self.path(config, filename)
        write_json(p, payload)
        self.artifacts.append(p)
        return p

    def field(self, config, stem, sol):
        """Field CSV plus JSON sidecar for one bound state."""
        self.csv(config, f"{stem}.csv", FIELD_HEADER, sol.rows())
        self.json(config, f"{stem}.json", sol.sidecar())
