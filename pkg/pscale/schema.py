"""Input file and run configuration schemas.

Dataclasses are mirrored into pydantic models by the ``pydantic``
decorator; ``from_dict`` validates raw JSON objects through the mirror.
"""
import dataclasses
from dataclasses import dataclass, fields
from typing import Annotated, Any, Dict, Literal, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import JMAX, SUBHARMONIC_SAMPLES, WINDOW
from .errors import ParseError


def pydantic(cls):
    return model(dataclass(kw_only=True)(cls))


def validator(self) -> BaseModel:
    attrs = {name: getattr(self, name) for name in self.__pydantic__.model_fields}
    try:
        return self.__pydantic__(**attrs)
    except ValidationError as e:
        raise ParseError(f"invalid {type(self).__name__}: {e}") from e


def from_dict(cls, data: Dict[str, Any]):
    if not isinstance(data, dict):
        raise ParseError(f"{cls.__name__} must be a JSON object")
    try:
        validated = cls.__pydantic__.model_validate(data)
    except ValidationError as e:
        raise ParseError(f"invalid {cls.__name__}: {e}") from e
    return cls(**{f.name: getattr(validated, f.name) for f in fields(cls)})


def get_field_def(cls, field):
    # if the dataclass has a default_factory, or a default value, use it in pydantic Field
    kwargs = {}
    if not isinstance(field.default, dataclasses._MISSING_TYPE):
        kwargs["default"] = field.default
    if not isinstance(field.default_factory, dataclasses._MISSING_TYPE):
        kwargs["default_factory"] = field.default_factory
    return Field(**kwargs)


def model(cls: Type) -> Type:
    """
    Decorator to mirror a dataclass as a Pydantic model.
    """
    pydantic_cls = type(
        cls.__name__ + "Model",
        (BaseModel,),
        {
            "__annotations__": {**{field.name: field.type for field in fields(cls)}},
            **{field.name: get_field_def(cls, field) for field in fields(cls)},
            "model_config": ConfigDict(extra="ignore", strict=False),
        },
    )
    cls.__pydantic__ = pydantic_cls
    cls.validator = validator
    cls.from_dict = classmethod(from_dict)

    return cls


@pydantic
class DomainFile:
    n: Annotated[int, Field(ge=2)]
    F: str
    label: str = ""


@pydantic
class SequenceFile:
    kind: Literal["normal", "cone", "tangential", "explicit"]
    params: Dict[str, Any] = dataclasses.field(default_factory=dict)
    jmax: Annotated[int, Field(ge=1)] = JMAX


@pydantic
class PolyFile:
    P: str
    nvars: Annotated[int, Field(ge=1)] = 1


@pydantic
class RunConfig:
    tol: Annotated[float, Field(gt=0)] = 1e-9
    jmax: Annotated[int, Field(ge=2)] = JMAX
    window: Annotated[int, Field(ge=2)] = WINDOW
    samples: Annotated[int, Field(ge=1)] = SUBHARMONIC_SAMPLES
    output: Optional[str] = None

    def checked(self) -> "RunConfig":
        self.validator()
        if self.jmax < self.window:
            raise ParseError(f"jmax ({self.jmax}) must be >= window ({self.window})")
        return self

