"""Named configuration presets.

A preset is a partial ``RunConfig``: a mapping of field names to values that
is applied below the values of a config file and of command-line flags.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any

from mellin_volatility.config import RunConfig
from mellin_volatility.exceptions import UnknownPresetError


@dataclass(frozen=True)
class Preset:
    """A named set of ``RunConfig`` overrides.

    Attributes:
        name: Unique preset name.
        description: One-line description.
        values: Field overrides, validated against ``RunConfig`` on registration.
    """

    name: str
    description: str
    values: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", MappingProxyType(dict(self.values)))


@dataclass
class PresetRegistry:
    """Registry of configuration presets.

    Attributes:
        presets: Dictionary mapping preset names to presets.

    Example:
        ```python
        registry = PresetRegistry()
        registry.register(Preset("quick", "Small study", {"n": 1000, "reps": 5}))

        registry.resolve("quick").values["n"]  # 1000
        registry.list_presets()  # ["quick"]
        ```
    """

    presets: dict[str, Preset] = field(default_factory=dict)

    def register(self, preset: Preset, *, replace: bool = False) -> None:
        """Register a preset.

        Args:
            preset: The preset.
            replace: Overwrite an existing preset of the same name.

        Raises:
            ValueError: If the name exists and ``replace`` is False, or if the
                preset names fields that ``RunConfig`` does not have.
        """
        if preset.name in self.presets and not replace:
            raise ValueError(f"Preset '{preset.name}' already exists")
        unknown = sorted(set(preset.values) - set(RunConfig.model_fields))
        if unknown:
            raise ValueError(f"Preset '{preset.name}' sets unknown fields: {', '.join(unknown)}")
        self.presets[preset.name] = preset

    def get(self, name: str) -> Preset | None:
        """Get a preset by name, or None if not found."""
        return self.presets.get(name)

    def resolve(self, name: str) -> Preset:
        """Get a preset by name.

        Raises:
            UnknownPresetError: If no preset has that name; the message lists
                the available presets.
        """
        preset = self.presets.get(name)
        if preset is None:
            raise UnknownPresetError(name, self.list_presets())
        return preset

    def remove(self, name: str) -> bool:
        """Remove a preset; returns True if it was registered."""
        return self.presets.pop(name, None) is not None

    def list_presets(self) -> list[str]:
        return sorted(self.presets)

    def exists(self, name: str) -> bool:
        return name in self.presets

    def count(self) -> int:
        return len(self.presets)

    def get_summary(self) -> str:
        """Multi-line description of all registered presets."""
        if not self.presets:
            return "No presets registered."
        lines = [f"Presets ({len(self.presets)}):"]
        for name in self.list_presets():
            lines.append(f"- {name}: {self.presets[name].description}")
        return "\n".join(lines)


def default_registry() -> PresetRegistry:
    """Registry with the built-in Monte-Carlo presets.

    - ``figure1``: exponential OU, ``delta = 0.01``, ``n = 5000``, 50 replications.
    - ``figure2``: as ``figure1`` at ``n = 5000`` and ``n = 20000``.
    - ``theorem-rate``: as ``figure2`` with ``delta_n = (sqrt(n) log(n)^2)^-1``.
    """
    registry = PresetRegistry()
    study = {"command": "mc", "process": "exp-ou", "delta": 0.01, "reps": 50}
    registry.register(
        Preset("figure1", "exp-ou, delta=0.01, n=5000, 50 replications", {**study, "n": 5000})
    )
    registry.register(
        Preset(
            "figure2",
            "exp-ou, delta=0.01, n in {5000, 20000}, 50 replications",
            {**study, "n": 5000, "sizes": [5000, 20000]},
        )
    )
    registry.register(
        Preset(
            "theorem-rate",
            "exp-ou, delta_n = 1/(sqrt(n) log(n)^2), n in {5000, 20000}, 50 replications",
            {**study, "n": 5000, "sizes": [5000, 20000], "delta_rule": "theorem-rate"},
        )
    )
    return registry
