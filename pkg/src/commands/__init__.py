"""Pipeline subcommands."""

from commands.base import Command
from commands.evaluate import EvalCommand
from commands.experiments import AblateCommand, SelectKCommand
from commands.fuse import FuseCommand
from commands.gradcheck import GradcheckCommand
from commands.params import ParamsCommand
from commands.prepare import PrepareCommand
from commands.synth import SynthCommand
from commands.train import TrainCommand

__all__ = [
    "AblateCommand",
    "Command",
    "EvalCommand",
    "FuseCommand",
    "GradcheckCommand",
    "ParamsCommand",
    "PrepareCommand",
    "SelectKCommand",
    "SynthCommand",
    "TrainCommand",
]
