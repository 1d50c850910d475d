from abc import abstractmethod
from typing import TYPE_CHECKING

from core.action_schema import ActionSchema
from core.action_response import ActionResponse

if TYPE_CHECKING:
    from core.workbench import Workbench

class ActionRunner(ActionSchema):
    """
    Base class for workbench commands.
    The ActionRunner inherits from ActionSchema, so a command's fields are its command-line options, each with a
    description and default. In addition, it provides a common interface for executing the command.

    Class Methods:
        discriminator(cls) -> str: Returns the command name. Defaults to the class name.
        description(cls) -> str: Returns the description for the command. Must be implemented by subclasses.
        run(self, workbench: "Workbench") -> ActionResponse: Executes the command.
        to_dict(cls) -> dict: Returns the schema definition as a dictionary.
        to_json(cls, indent: int = None) -> str: Returns the schema definition as a JSON schema.

    Subclasses of ActionRunner must implement the run() and description() method.
    """

    @abstractmethod
    async def run(self, workbench: "Workbench") -> ActionResponse:
        """
        Execute the command. Must be implemented by subclasses.
        Implementing class must return an ActionResponse
        """
        raise NotImplementedError
