"""
Theme configuration for nematic-colloids reports.
"""


class ColloidTheme:
    """Section and status markers used in text reports."""

    # Feature flags
    USE_EMOJI = True

    STATUS = {
        "pass": "✅",
        "fail": "❌",
        "ok": "✅",
        "unconverged": "⚠️",
        "failed": "❌",
        "unknown": "❓",
    }

    SECTIONS = {
        "header": "📌",
        "moments": "📐",
        "design": "🧪",
        "energy": "⚡",
        "potential": "📈",
        "sweep": "📊",
        "selftest": "🔬",
        "details": "📝",
        "configuration": "⚙️",
    }

    PLAIN = {
        "pass": "[PASS]",
        "fail": "[FAIL]",
        "ok": "[ok]",
        "unconverged": "[!]",
        "failed": "[x]",
        "unknown": "[?]",
    }

    @classmethod
    def get_status_marker(cls, status: str) -> str:
        """Marker for a status with fallback; the status may carry a ": detail" suffix."""
        key = status.lower().split(":", 1)[0].strip()
        table = cls.STATUS if cls.USE_EMOJI else cls.PLAIN
        return table.get(key, table["unknown"])

    @classmethod
    def get_section_marker(cls, section: str) -> str:
        if not cls.USE_EMOJI:
            return "=="
        return cls.SECTIONS.get(section.lower(), cls.SECTIONS["details"])
