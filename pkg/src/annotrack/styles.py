"""Annotation style feature flags and the seven experiment presets.

Feature flags nest: smartjump needs sparklines, sparklines need autotrack,
autotrack needs the timeline. Styles without a timeline present frames in a
seeded random order instead.
"""

from __future__ import annotations

from dataclasses import dataclass

CLICK_MODES = ("point", "xclick")
PRESENTATIONS = ("random_order", "timeline")


@dataclass(frozen=True)
class AnnotationStyle:
    name: str
    timeline: bool
    autotrack: bool
    show_boxes_on_annotations: bool
    sparklines: bool
    smartjump: bool
    presentation: str  # "random_order" | "timeline"
    click_mode: str  # "point" | "xclick"

    def __post_init__(self):
        if self.click_mode not in CLICK_MODES:
            raise ValueError(f"unknown click mode {self.click_mode!r}")
        if self.presentation not in PRESENTATIONS:
            raise ValueError(f"unknown presentation {self.presentation!r}")
        if self.smartjump and not self.sparklines:
            raise ValueError("smartjump requires sparklines")
        if self.sparklines and not self.autotrack:
            raise ValueError("sparklines require autotrack")
        if self.autotrack and not self.timeline:
            raise ValueError("autotrack requires the timeline")
        if (self.presentation == "timeline") != self.timeline:
            raise ValueError("presentation must be 'timeline' exactly when the timeline is enabled")


def _preset(name: str, **flags) -> AnnotationStyle:
    timeline = flags.get("timeline", False)
    return AnnotationStyle(
        name=name,
        timeline=timeline,
        autotrack=flags.get("autotrack", False),
        show_boxes_on_annotations=flags.get("show_boxes_on_annotations", False),
        sparklines=flags.get("sparklines", False),
        smartjump=flags.get("smartjump", False),
        presentation="timeline" if timeline else "random_order",
        click_mode=flags.get("click_mode", "point"),
    )


PRESETS: dict[str, AnnotationStyle] = {
    "xclick": _preset("xclick", click_mode="xclick"),
    "click": _preset("click"),
    "boxes": _preset("boxes", show_boxes_on_annotations=True),
    "autotrack": _preset("autotrack", timeline=True, autotrack=True),
    "autotrack-boxes": _preset(
        "autotrack-boxes", timeline=True, autotrack=True, show_boxes_on_annotations=True
    ),
    "autotrack-boxes-sparklines": _preset(
        "autotrack-boxes-sparklines",
        timeline=True,
        autotrack=True,
        show_boxes_on_annotations=True,
        sparklines=True,
    ),
    "autotrack-boxes-sparklines-smartjump": _preset(
        "autotrack-boxes-sparklines-smartjump",
        timeline=True,
        autotrack=True,
        show_boxes_on_annotations=True,
        sparklines=True,
        smartjump=True,
    ),
}


def preset(name: str) -> AnnotationStyle:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown style {name!r}; choose one of {', '.join(PRESETS)}") from None
