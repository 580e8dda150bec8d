from src.commands.command_manager import CommandManager, run
