"""
Reusable text components for nematic-colloids reports.
"""
from typing import Any, Dict, List, Optional


class ColloidComponents:
    """Reusable components for formatted output."""

    @staticmethod
    def create_table(headers: List[str], rows: List[List[Any]], title: Optional[str] = None) -> str:
        """Create an ASCII table with optional title.

        Args:
            headers: List of column headers
            rows: List of row data; cells may span several lines
            title: Optional table title

        Returns:
            Formatted table string
        """
        widths = [len(header) for header in headers]
        for row in rows:
            for i, cell in enumerate(row):
                widths[i] = max(widths[i], max(len(line) for line in str(cell).split("\n")))

        separator = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
        total_width = sum(widths) + 3 * len(widths) + 1

        result = []
        if title:
            padding = (total_width - len(title) - 2) // 2
            title_separator = "+" + "-" * (total_width - 2) + "+"
            result.extend([
                title_separator,
                "|" + " " * padding + title + " " * (total_width - padding - len(title) - 2) + "|",
            ])

        header = "|" + "|".join(f" {h:<{w}} " for w, h in zip(widths, headers)) + "|"
        result.extend([separator, header, separator])

        for row in rows:
            cell_lines = [str(cell).split("\n") for cell in row]
            max_lines = max(len(lines) for lines in cell_lines)
            for lines in cell_lines:
                lines.extend([""] * (max_lines - len(lines)))
            for line_idx in range(max_lines):
                parts = [f" {lines[line_idx]:<{widths[i]}} " for i, lines in enumerate(cell_lines)]
                result.append("|" + "|".join(parts) + "|")

        result.append(separator)
        return "\n".join(result)

    @staticmethod
    def create_key_value_grid(data: Dict[str, Any], columns: int = 1) -> str:
        """Create a grid of key-value pairs.

        Args:
            data: Dictionary of key-value pairs, in display order
            columns: Number of pairs per line

        Returns:
            Formatted grid string
        """
        items = list(data.items())
        rows = [items[i : i + columns] for i in range(0, len(items), columns)]
        key_widths = [0] * columns
        val_widths = [0] * columns
        for row in rows:
            for i, (key, val) in enumerate(row):
                key_widths[i] = max(key_widths[i], len(str(key)) + 1)
                val_widths[i] = max(val_widths[i], len(str(val)))

        result = []
        for row in rows:
            formatted = [
                f"{str(key) + ':':<{key_widths[i]}} {str(val):<{val_widths[i]}}"
                for i, (key, val) in enumerate(row)
            ]
            result.append(("  " + "  ".join(formatted)).rstrip())
        return "\n".join(result)
