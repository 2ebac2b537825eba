#!/usr/bin/env python3
"""
Clear the verification run history
"""

from src.verifier.config import load_config, resolve_path, section
from src.verifier.tools.report_manager import ReportManager


def clear_history():
    """Clear run history"""
    history = section(load_config(), "history")
    manager = ReportManager(resolve_path(history["history_file"]))

    if manager.clear():
        print("🗑️  Check history cleared!")
    else:
        print("📁 No check history file found")


if __name__ == "__main__":
    clear_history()
