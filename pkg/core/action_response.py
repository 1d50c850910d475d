from typing import Any, Union
from typing_extensions import override

from pydantic import Field

from core.action_schema import ActionSchema


class ActionResponse(ActionSchema):
    """
    What every command returns. The entrypoint prints it as JSON and exits 0 when it is ok, 1 otherwise.
    """
    status_code: int = Field(description = "The status code of the command: 200 on success, 4xx/5xx on failure")
    message: Union[str, None] = Field(description = "The message of the response", default = None)
    fields: Union[str, int, float, bool, list[Any], dict[str, Any], None] = Field(description = "The fields of the response", default = None)

    @property
    def ok(self) -> bool:
        return self.status_code < 400

    @classmethod
    @override
    def description(cls) -> str:
        return "The schema used as a standard response returned by ActionRunner.run()"
