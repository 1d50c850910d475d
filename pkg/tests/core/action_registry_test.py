import json
import os
import tempfile
from typing import TYPE_CHECKING
from typing_extensions import override
from unittest import TestCase
from unittest.mock import patch

from core.action_registry import ActionRegistry
from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.action_schema import ActionSchema

if TYPE_CHECKING:
    from core.workbench import Workbench

COMMANDS = {
    "datasize", "eval", "experiment", "fewshot", "generate", "help", "inspect-verbalizer", "pretrain", "prompt-tune",
    "quantize", "report", "synth"
}


class ActionRegistryTest(TestCase):
    """Test cases for ActionRegistry class."""

    test_action_runner: type[ActionRunner]  # type: ignore

    @override
    def setUp(self) -> None:
        class TestActionRunner(ActionRunner):
            name: str = "test"

            @classmethod
            @override
            def description(cls) -> str:
                return "Test ActionRunner"

            @override
            async def run(self, workbench: "Workbench") -> ActionResponse:
                return ActionResponse(status_code = 200)

        self.test_action_runner = TestActionRunner

    def test_valid_action_types(self) -> None:
        valid_types = ActionRegistry.valid_action_types()

        self.assertIn(ActionSchema, valid_types)
        self.assertIn(ActionRunner, valid_types)
        self.assertEqual(len(valid_types), 2)

    def test_discover_with_nonexistent_path(self) -> None:
        self.assertEqual(ActionRegistry.discover("/nonexistent/path", ActionSchema), {})

    def test_discover_with_invalid_action_type(self) -> None:
        with self.assertRaises(ValueError):
            ActionRegistry.discover("actions", str)

    def test_discover_ignores_non_python_and_init_files(self) -> None:
        """Only modules directly inside the directory are imported."""
        with tempfile.TemporaryDirectory() as temp_dir:
            with open(os.path.join(temp_dir, "notes.txt"), "w") as f:
                f.write("This is not Python code")
            with open(os.path.join(temp_dir, "__init__.py"), "w") as f:
                f.write("# Empty init file")
            os.makedirs(os.path.join(temp_dir, "subdir"))

            self.assertEqual(ActionRegistry.discover(temp_dir, ActionSchema), {})

    def test_every_command_is_registered(self) -> None:
        commands = ActionRegistry.commands("actions")

        self.assertEqual(set(commands), COMMANDS)
        for name, runner in commands.items():
            self.assertTrue(issubclass(runner, ActionRunner), name)
            self.assertEqual(runner.discriminator(), name)

    def test_commands_keeps_only_runners(self) -> None:
        with patch.object(ActionRegistry, "discover") as mock_discover:
            mock_discover.return_value = {"test": self.test_action_runner, "schema": ActionResponse}

            result = ActionRegistry.commands("test_path")

            mock_discover.assert_called_once_with("test_path", ActionRunner)
            self.assertEqual(result, {"test": self.test_action_runner})

    def test_dict_describes_every_command(self) -> None:
        result = ActionRegistry.dict()

        self.assertEqual(set(result), COMMANDS)
        experiment = result["experiment"]
        self.assertIn("description", experiment)
        self.assertFalse(experiment["fields"]["config"]["required"])

    def test_dict_method_returns_to_dict(self) -> None:
        with patch.object(ActionRegistry, "discover") as mock_discover:
            mock_discover.return_value = {"TestActionRunner": self.test_action_runner}

            result = ActionRegistry.dict("test_path")

            self.assertIn("TestActionRunner", result)
            self.assertEqual(result["TestActionRunner"]["description"], "Test ActionRunner")
            self.assertEqual(result["TestActionRunner"]["fields"]["name"]["default"], "test")

    def test_json_method_returns_json_string(self) -> None:
        with patch.object(ActionRegistry, "dict") as mock_dict:
            mock_dict.return_value = {"TestRunner": {"description": "Test", "fields": {}}}

            result = ActionRegistry.json("test_path", indent = 2)

            mock_dict.assert_called_once_with("test_path")
            self.assertIn("TestRunner", json.loads(result))

    def test_json_method_default_path(self) -> None:
        with patch.object(ActionRegistry, "dict") as mock_dict:
            mock_dict.return_value = {}

            ActionRegistry.json()

            mock_dict.assert_called_once_with("actions")


if __name__ == "__main__":
    from unittest import main
    main()
