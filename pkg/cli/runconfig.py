"""
Shared plumbing for the workbench management commands.

Every command builds a RunConfig from its options, runs, and hands back a
CommandOutcome. WorkbenchCommand renders the outcome (human text or JSON
with sorted keys, to stdout or --output) and maps failures to exit codes:

    0  success, equality, isomorphic
    1  violation, mismatch, not isomorphic
    2  usage error, unreadable input, exhausted budget
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from django.core.management.base import BaseCommand, CommandError

from formulas.exceptions import LipschitzViolation
from scott_gh.exceptions import KatetovViolation, RankInvariantViolation
from structures.conf import workbench_setting
from structures.exceptions import StructureViolation, WorkbenchError
from synthesis.exceptions import Mismatch

logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_USAGE = 2

FORMATS = ('human', 'json')

# Errors that describe the inputs rather than a misuse of the tool.
VIOLATIONS = (StructureViolation, Mismatch, LipschitzViolation, KatetovViolation, RankInvariantViolation)


class UsageError(WorkbenchError):
    code = 'USAGE'


@dataclass
class RunConfig:
    command: str
    inputs: List[str] = field(default_factory=list)
    tuple_budget: Optional[int] = None
    alpha_ceiling: Optional[int] = None
    n_probe: Optional[int] = None
    output: Optional[str] = None
    output_format: str = 'human'

    @classmethod
    def from_options(cls, command: str, inputs: List[str], options: Dict[str, Any]) -> 'RunConfig':
        return cls(
            command=command,
            inputs=inputs,
            tuple_budget=workbench_setting('TUPLE_BUDGET', options.get('budget')),
            alpha_ceiling=workbench_setting('ALPHA_CEILING', options.get('alpha_ceiling')),
            n_probe=options.get('n_probe'),
            output=options.get('output'),
            output_format=options.get('format') or 'human',
        )

    def validate(self) -> None:
        if self.output_format not in FORMATS:
            raise UsageError(f"Unknown format {self.output_format!r}")
        if self.tuple_budget < 1:
            raise UsageError("--budget must be positive")
        if self.alpha_ceiling < 0:
            raise UsageError("--alpha-ceiling must be nonnegative")
        if self.n_probe is not None and self.n_probe < 0:
            raise UsageError("--n-probe must be nonnegative")
        for path in self.inputs:
            if not Path(path).is_file():
                raise UsageError(f"File not found: {path}", path=path)


@dataclass
class CommandOutcome:
    payload: Dict[str, Any]
    text: str
    ok: bool = True
    failure: str = ''


class WorkbenchCommand(BaseCommand):
    """Base for commands that take input files and share the budget flags."""

    input_arguments: List[str] = []

    def add_inputs(self, parser) -> None:
        pass

    def add_arguments(self, parser):
        self.add_inputs(parser)
        parser.add_argument('--format', choices=FORMATS, default='human', help='Output format')
        parser.add_argument('--output', type=str, help='Write the result to this file')
        parser.add_argument('--budget', type=int, help='Tuple enumeration cap (default CLW_BUDGET)')
        parser.add_argument('--alpha-ceiling', type=int, help='Highest back-and-forth stage')
        parser.add_argument('--n-probe', type=int, help='Tuple length probed for stabilization')

    def command_name(self) -> str:
        return self.__class__.__module__.rsplit('.', 1)[-1]

    def input_paths(self, options) -> List[str]:
        paths = []
        for name in self.input_arguments:
            value = options.get(name)
            if value is None:
                continue
            paths.extend(value if isinstance(value, list) else [value])
        return paths

    def run(self, config: RunConfig, options) -> CommandOutcome:
        raise NotImplementedError

    def handle(self, *args, **options):
        config = RunConfig.from_options(self.command_name(), self.input_paths(options), options)
        try:
            config.validate()
            outcome = self.run(config, options)
        except WorkbenchError as e:
            self.stderr.write(json.dumps(e.to_dict(), sort_keys=True))
            returncode = EXIT_FAILURE if isinstance(e, VIOLATIONS) else EXIT_USAGE
            raise CommandError(str(e), returncode=returncode)

        self.emit(config, outcome)
        logger.info("%s finished: %s", config.command, 'ok' if outcome.ok else outcome.failure)
        if not outcome.ok:
            raise CommandError(outcome.failure or f"{config.command} failed", returncode=EXIT_FAILURE)

    def emit(self, config: RunConfig, outcome: CommandOutcome) -> None:
        if config.output_format == 'json':
            rendered = json.dumps(outcome.payload, sort_keys=True, indent=2)
        else:
            rendered = outcome.text
        if config.output:
            with open(config.output, 'w', encoding='utf-8') as f:
                f.write(rendered + '\n')
        elif config.output_format == 'human':
            self.stdout.write(rendered, style_func=self.style.SUCCESS if outcome.ok else self.style.ERROR)
        else:
            self.stdout.write(rendered)
