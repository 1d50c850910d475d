from abc import ABC, abstractmethod
from json import dumps
from typing import Any, Type, cast

from pydantic import BaseModel


class ActionSchema(BaseModel, ABC):
    """
    Base class for every typed record in the workbench: commands, configs, dataset examples and reports.
    It provides a common interface for describing a record and exporting its field definitions.

    Subclasses of ActionSchema must implement the description() method.
    """

    @classmethod
    def discriminator(cls) -> str:
        """
        Discriminator is used to identify the record. Defaults to the class name.

        Returns:
            str: The discriminator for the record.
        """
        return cls.__name__

    @classmethod
    @abstractmethod
    def description(cls) -> str:
        """
        Returns the description for the record. Must be implemented by subclasses.

        Returns:
            str: The description of the record.
        """
        pass

    @classmethod
    def to_dict(cls) -> dict[str, Any]:
        """
        Returns the field definitions as a dictionary: type, description, default and whether the field is required.
        Nested ActionSchema fields are expanded in place. Aliased fields are listed under their alias.

        Returns:
            dict: {discriminator: {"description": ..., "fields": {...}}}
        """
        schema = cls.model_json_schema()
        properties = schema.get("properties", {})
        required = set(schema.get("required", []))

        fields: dict[str, Any] = {}
        for name, model_field in cls.model_fields.items():
            field_name = model_field.alias or name
            field_schema = properties.get(field_name, {})
            annotation = model_field.annotation
            if isinstance(annotation, type) and issubclass(annotation, ActionSchema):
                nested = cast(Type[ActionSchema], annotation)
                fields[field_name] = {
                    "type": nested.discriminator(),
                    "description": nested.description(),
                    "fields": nested.to_dict()[nested.discriminator()]["fields"]
                }
                continue

            field_info: dict[str, Any] = {
                "type": field_schema.get("type", "any"),
                "description": field_schema.get("description"),
                "required": field_name in required
            }
            if "default" in field_schema:
                field_info["default"] = field_schema["default"]
            fields[field_name] = field_info

        return {
            cls.discriminator(): {
                "description": cls.description(),
                "fields": fields
            }
        }

    @classmethod
    def to_json(cls, indent: int | None = None) -> str:
        """
        Returns the field definitions as JSON.

        Args:
            indent (int, optional): The indentation level. Defaults to None.

        Returns:
            str: The JSON field definitions.
        """
        return dumps(cls.to_dict(), indent = indent)
