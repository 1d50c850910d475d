import asyncio
from pathlib import Path
from tempfile import TemporaryDirectory
from typing_extensions import override
from unittest import TestCase

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.errors import ConfigError, LengthError, MissingArtifactError
from core.workbench import Workbench


class Echo(ActionRunner):
    count: int = Field(description = "A count.", default = 1, ge = 0)
    raise_error: str | None = Field(description = "Error to raise.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "echo"

    @classmethod
    @override
    def description(cls) -> str:
        return "Echoes its options."

    @override
    async def run(self, workbench: Workbench) -> ActionResponse:
        errors: dict[str, Exception] = {
            "missing": MissingArtifactError("checkpoint not found: x.spul"),
            "length": LengthError("too long"),
            "bug": RuntimeError("boom"),
        }
        if self.raise_error is not None:
            raise errors[self.raise_error]
        return ActionResponse(status_code = 200, fields = {"count": self.count})


class ParseArgumentsTest(TestCase):

    def test_empty_command_line_asks_for_help(self) -> None:
        self.assertEqual(Workbench.parse_arguments([]), ("help", {}))

    def test_options(self) -> None:
        command, fields = Workbench.parse_arguments(["eval", "--n-test", "5", "--train.max_steps=3", "--verbose", "--beam", "2"])

        self.assertEqual(command, "eval")
        self.assertEqual(fields, {"n_test": "5", "train.max_steps": "3", "verbose": "true", "beam": "2"})

    def test_trailing_flag(self) -> None:
        self.assertEqual(Workbench.parse_arguments(["quantize", "--dedup"]), ("quantize", {"dedup": "true"}))

    def test_positional_arguments_are_rejected(self) -> None:
        with self.assertRaises(ConfigError):
            Workbench.parse_arguments(["eval", "model.spul"])
        with self.assertRaises(ConfigError):
            Workbench.parse_arguments(["eval", "--"])


class DispatchTest(TestCase):

    @override
    def setUp(self) -> None:
        self.workbench = Workbench(actions = {"echo": Echo})

    def dispatch(self, *argv: str) -> ActionResponse:
        return asyncio.run(self.workbench.dispatch(list(argv)))

    def test_success(self) -> None:
        response = self.dispatch("echo", "--count", "3")

        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.fields, {"count": 3})
        self.assertEqual(Workbench.exit_code(response), 0)

    def test_unknown_command(self) -> None:
        response = self.dispatch("nope")

        self.assertEqual(response.status_code, 404)
        self.assertIn("echo", response.message or "")
        self.assertEqual(Workbench.exit_code(response), 1)

    def test_invalid_option_value(self) -> None:
        response = self.dispatch("echo", "--count", "-1")

        self.assertEqual(response.status_code, 400)
        self.assertIn("count", response.message or "")

    def test_positional_argument(self) -> None:
        self.assertEqual(self.dispatch("echo", "stray").status_code, 400)

    def test_workbench_errors_keep_their_status(self) -> None:
        missing = self.dispatch("echo", "--raise-error", "missing")
        length = self.dispatch("echo", "--raise-error", "length")

        self.assertEqual(missing.status_code, 404)
        self.assertEqual(missing.fields, {"error": "MissingArtifactError"})
        self.assertEqual(length.status_code, 422)
        self.assertEqual(length.message, "too long")

    def test_unexpected_errors_are_internal(self) -> None:
        with self.assertLogs("speechprompt.core.workbench", level = "ERROR"):
            response = self.dispatch("echo", "--raise-error", "bug")

        self.assertEqual(response.status_code, 500)
        self.assertEqual(response.message, "Internal error")

    def test_artifact_creates_the_cache(self) -> None:
        with TemporaryDirectory() as temp_dir:
            workbench = Workbench(cache_dir = Path(temp_dir) / "cache", actions = {})
            path = workbench.artifact("reports.csv")

            self.assertEqual(path, Path(temp_dir) / "cache" / "reports.csv")
            self.assertTrue(path.parent.is_dir())


if __name__ == "__main__":
    from unittest import main
    main()
