"""Tests for registry module."""

from __future__ import annotations

import pytest

from mellin_volatility import Preset, PresetRegistry, RunConfig, UnknownPresetError


class TestPreset:
    """Tests for Preset."""

    def test_values_are_read_only(self):
        """Test preset values cannot be changed after creation."""
        source = {"n": 100}
        preset = Preset("small", "Small run", source)
        source["n"] = 200
        assert preset.values["n"] == 100
        with pytest.raises(TypeError):
            preset.values["n"] = 300  # type: ignore[index]


class TestPresetRegistry:
    """Tests for PresetRegistry."""

    def test_register_preset(self, registry: PresetRegistry):
        """Test registering a preset."""
        preset = Preset("quick", "Quick study", {"n": 1000, "reps": 5})

        registry.register(preset)

        assert registry.exists("quick")
        assert registry.get("quick") is preset
        assert registry.resolve("quick").values["reps"] == 5

    def test_register_duplicate_raises(self, registry: PresetRegistry):
        """Test that registering a duplicate preset raises error."""
        registry.register(Preset("quick", "Quick study", {"n": 1000}))

        with pytest.raises(ValueError, match="already exists"):
            registry.register(Preset("quick", "Other", {"n": 2000}))

    def test_register_replace(self, registry: PresetRegistry):
        """Test replacing a preset explicitly."""
        registry.register(Preset("quick", "Quick study", {"n": 1000}))
        registry.register(Preset("quick", "Other", {"n": 2000}), replace=True)

        assert registry.resolve("quick").values["n"] == 2000
        assert registry.count() == 1

    def test_register_unknown_field_raises(self, registry: PresetRegistry):
        """Test presets may only set RunConfig fields."""
        with pytest.raises(ValueError, match="unknown fields: bogus"):
            registry.register(Preset("bad", "Bad preset", {"n": 10, "bogus": 1}))
        assert not registry.exists("bad")

    def test_get_nonexistent(self, registry: PresetRegistry):
        """Test getting a nonexistent preset."""
        assert registry.get("nonexistent") is None

    def test_resolve_nonexistent_lists_presets(self, presets: PresetRegistry):
        """Test resolving an unknown name names the available presets."""
        with pytest.raises(UnknownPresetError) as exc_info:
            presets.resolve("figure9")

        message = str(exc_info.value)
        assert "figure9" in message
        assert "figure1, figure2, theorem-rate" in message
        assert isinstance(exc_info.value, KeyError)

    def test_remove(self, registry: PresetRegistry):
        """Test removing a preset."""
        registry.register(Preset("quick", "Quick study"))

        assert registry.remove("quick") is True
        assert registry.remove("quick") is False
        assert not registry.exists("quick")

    def test_list_and_count(self, registry: PresetRegistry):
        """Test listing presets in sorted order."""
        registry.register(Preset("b", "Second"))
        registry.register(Preset("a", "First"))

        assert registry.list_presets() == ["a", "b"]
        assert registry.count() == 2

    def test_get_summary_empty(self, registry: PresetRegistry):
        """Test summary with no presets."""
        assert registry.get_summary() == "No presets registered."

    def test_get_summary(self, registry: PresetRegistry):
        """Test summary lists presets with descriptions."""
        registry.register(Preset("quick", "Quick study"))

        summary = registry.get_summary()

        assert "Presets (1):" in summary
        assert "- quick: Quick study" in summary


class TestDefaultRegistry:
    """Tests for the built-in presets."""

    def test_names(self, presets: PresetRegistry):
        """Test the built-in preset names."""
        assert presets.list_presets() == ["figure1", "figure2", "theorem-rate"]

    def test_presets_build_valid_configs(self, presets: PresetRegistry):
        """Test every preset produces a valid Monte-Carlo run."""
        for name in presets.list_presets():
            config = RunConfig(**presets.resolve(name).values)
            assert config.command == "mc"
            assert config.delta == 0.01
            assert config.reps == 50

    def test_sample_sizes(self, presets: PresetRegistry):
        """Test single and double sample-size studies."""
        single = RunConfig(**presets.resolve("figure1").values)
        double = RunConfig(**presets.resolve("figure2").values)
        rate = RunConfig(**presets.resolve("theorem-rate").values)
        assert single.sample_sizes() == [5000]
        assert double.sample_sizes() == [5000, 20000]
        assert rate.delta_rule == "theorem-rate"
        assert rate.path_config(20000).delta < rate.path_config(5000).delta
