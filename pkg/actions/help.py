from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner

if TYPE_CHECKING:
    from core.workbench import Workbench


class HelpCommand(ActionRunner):
    command: str | None = Field(description = "Describe only this command.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "help"

    @classmethod
    @override
    def description(cls) -> str:
        return "Lists every command with its options, descriptions and defaults."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        if self.command is not None:
            if self.command not in workbench.actions:
                return ActionResponse(status_code = 404, message = f"Unknown command: {self.command}")
            return ActionResponse(status_code = 200, fields = workbench.actions[self.command].to_dict())
        schemas: dict[str, object] = {}
        for name in sorted(workbench.actions):
            schemas.update(workbench.actions[name].to_dict())
        return ActionResponse(status_code = 200, fields = schemas)
