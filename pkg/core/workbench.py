from pathlib import Path
from typing import Any, Sequence, Type

from pydantic import BaseModel, Field, ValidationError

from core.action_registry import ActionRegistry
from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.errors import ConfigError, SpeechPromptError
from core.log import get_logger

logger = get_logger(__name__)

DEFAULT_CACHE_DIR = ".speechprompt_cache"
CACHE_ENV = "SPEECHPROMPT_CACHE"


class Workbench(BaseModel):
    """
    Dispatches command lines to the registered command runners and turns every outcome into an ActionResponse.

    Attributes:
        cache_dir (Path): Directory for artifacts written without an explicit path.
        workers (int): Threads used for evaluation.
        actions (dict[str, ActionRunner]): Command runners keyed by command name.

    Methods:
        parse_arguments(argv) -> (command, fields): Splits a command line into the command and its --key value pairs.
        dispatch(argv) -> ActionResponse: Runs one command line.
    """
    cache_dir: Path = Field(default = Path(DEFAULT_CACHE_DIR))
    workers: int = Field(default = 1, ge = 1)
    actions: dict[str, Type[ActionRunner]] = Field(default_factory = lambda: ActionRegistry.commands("actions"))

    def artifact(self, name: str) -> Path:
        """A path inside the cache directory, created on demand."""
        self.cache_dir.mkdir(parents = True, exist_ok = True)
        return self.cache_dir / name

    @staticmethod
    def parse_arguments(argv: Sequence[str]) -> tuple[str, dict[str, Any]]:
        """
        "<command> --key value --flag --section.key=value": a flag without a value is "true", dashes in keys become
        underscores and dotted keys are kept whole. Values stay strings; the command model coerces them.

        Raises:
            ConfigError: On a bare positional argument after the command.
        """
        if not argv:
            return "help", {}
        command, rest = argv[0], list(argv[1:])
        fields: dict[str, Any] = {}
        index = 0
        while index < len(rest):
            token = rest[index]
            if not token.startswith("--") or token == "--":
                raise ConfigError(f"unexpected argument {token!r}; options look like --key value")
            key, separator, value = token[2:].partition("=")
            index += 1
            if not separator:
                if index < len(rest) and not rest[index].startswith("--"):
                    value = rest[index]
                    index += 1
                else:
                    value = "true"
            fields[key.replace("-", "_")] = value
        return command, fields

    async def dispatch(self, argv: Sequence[str]) -> ActionResponse:
        """
        Runs one command line. Unknown commands answer 404, invalid options and configs 400, workbench errors their
        own status code and anything unexpected 500.
        """
        try:
            command, fields = self.parse_arguments(argv)
        except ConfigError as error:
            return ActionResponse(status_code = error.status_code, message = str(error))
        runner = self.actions.get(command)
        if runner is None:
            return ActionResponse(
                status_code = 404,
                message = f"Unknown command: {command}. Known commands: {', '.join(sorted(self.actions))}"
            )
        try:
            return await runner(**fields).run(self)
        except ValidationError as error:
            details = "; ".join(f"{'.'.join(str(part) for part in item['loc'])}: {item['msg']}" for item in error.errors())
            return ActionResponse(status_code = 400, message = f"Invalid options for {command}: {details}")
        except SpeechPromptError as error:
            return ActionResponse(
                status_code = error.status_code,
                message = str(error),
                fields = {"error": type(error).__name__}
            )
        except Exception:
            logger.exception("command %s failed", command)
            return ActionResponse(status_code = 500, message = "Internal error")

    @staticmethod
    def exit_code(response: ActionResponse) -> int:
        return 0 if response.ok else 1
