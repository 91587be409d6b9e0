"""Params command: trainable parameter counts."""

import argparse

from autodiff import param_count
from commands.base import MODEL_FIELDS, Command, add_run_config_arguments, resolve_run_config
from fgfgan.discriminator import Discriminator
from fgfgan.generator import Generator


class ParamsCommand(Command):
    name = "params"
    help = "print '<network> <count>' for the configured networks"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "--variants",
            action="store_true",
            help="also count the concat-fusion and attention-free generators",
        )
        add_run_config_arguments(parser, MODEL_FIELDS)

    def execute(self, args: argparse.Namespace) -> int:
        run_cfg = resolve_run_config(args, MODEL_FIELDS, self.name)
        gen_cfg = run_cfg.generator_config()
        print(f"generator {param_count(Generator(gen_cfg))}")
        if gen_cfg.use_gan:
            print(f"discriminator {param_count(Discriminator(gen_cfg.bands))}")
        if args.variants:
            concat = gen_cfg.model_copy(update={"fusion": "concat"})
            no_sam = gen_cfg.model_copy(update={"use_sam": False})
            print(f"generator_concat {param_count(Generator(concat))}")
            print(f"generator_no_sam {param_count(Generator(no_sam))}")
        return 0
