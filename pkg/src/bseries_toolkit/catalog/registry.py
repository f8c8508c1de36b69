"""Named registries for built-in fields, series and tableaux."""

from dataclasses import dataclass, field
from typing import Any, Callable, Generic, TypeVar

from ..errors import UnknownNameError

T = TypeVar("T")


@dataclass
class CatalogEntry(Generic[T]):
    """A registered factory with its metadata."""

    name: str
    description: str
    factory: Callable[..., T]
    tags: list[str] = field(default_factory=list)

    def build(self, *args: Any, **kwargs: Any) -> T:
        return self.factory(*args, **kwargs)


class Registry(Generic[T]):
    """Factories by name, registered with a decorator.

    Example:
        @field_registry.register(description="x' = x^2 on the line", tags=["polynomial"])
        def poly1d() -> VectorField:
            ...
    """

    def __init__(self, kind: str):
        self.kind = kind
        self._entries: dict[str, CatalogEntry[T]] = {}

    def register(
        self,
        name: str | None = None,
        description: str | None = None,
        tags: list[str] | None = None,
    ) -> Callable:
        def decorator(func: Callable[..., T]) -> Callable[..., T]:
            key = name or func.__name__
            if key in self._entries:
                raise ValueError(f"{self.kind} {key!r} is already registered")
            self._entries[key] = CatalogEntry(
                name=key,
                description=description or (func.__doc__ or "").strip(),
                factory=func,
                tags=tags or [],
            )
            return func

        return decorator

    def get(self, name: str) -> CatalogEntry[T] | None:
        return self._entries.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._entries

    def names(self) -> list[str]:
        return sorted(self._entries)

    def get_by_tags(self, tags: list[str]) -> list[CatalogEntry[T]]:
        """Entries carrying any of the given tags."""
        return [e for e in self._entries.values() if any(tag in e.tags for tag in tags)]

    def all(self) -> list[CatalogEntry[T]]:
        return list(self._entries.values())

    def build(self, name: str, *args: Any, **kwargs: Any) -> T:
        entry = self.get(name)
        if entry is None:
            raise UnknownNameError(self.kind, name, self.names())
        return entry.build(*args, **kwargs)
