import json
import sys
from datetime import datetime, timedelta
from pathlib import Path

import aiofiles

MAX_ENTRIES = 100


class ReportManager:
    """Keeps a capped JSON history of verification runs."""

    def __init__(self, history_file="data/check_history.json", max_entries=MAX_ENTRIES):
        self.history_file = Path(history_file)
        self.max_entries = max_entries
        self.history_file.parent.mkdir(parents=True, exist_ok=True)

    def _load_history(self):
        """Load run history from file."""
        try:
            if self.history_file.exists():
                with open(self.history_file, "r") as f:
                    return json.load(f)
        except Exception as e:
            print(f"❌ Error loading check history: {e}", file=sys.stderr)
        return {"runs": []}

    async def _save_history(self, data):
        try:
            # serialize before truncating the file so a bad payload keeps the old history
            text = json.dumps(data, indent=2)
            async with aiofiles.open(self.history_file, "w") as f:
                await f.write(text)
        except Exception as e:
            print(f"❌ Error saving check history: {e}", file=sys.stderr)

    async def record_run(self, command, parameters, checks, all_pass):
        """Append one run; only the last max_entries runs are kept."""
        history = self._load_history()
        history.setdefault("runs", []).append(
            {
                "timestamp": datetime.now().isoformat(),
                "command": command,
                "parameters": parameters,
                "checks": [{"name": c["name"], "pass": c["pass"]} for c in checks],
                "all_pass": all_pass,
            }
        )
        if len(history["runs"]) > self.max_entries:
            history["runs"] = history["runs"][-self.max_entries:]
        await self._save_history(history)

    def get_recent_runs(self, hours=24):
        """Runs from the last N hours."""
        cutoff_time = datetime.now() - timedelta(hours=hours)
        recent = []
        for run in self._load_history().get("runs", []):
            try:
                if datetime.fromisoformat(run["timestamp"]) > cutoff_time:
                    recent.append(run)
            except (KeyError, ValueError):
                continue
        return recent

    def get_run_stats(self):
        runs = self._load_history().get("runs", [])
        if not runs:
            return {"total": 0, "passed": 0, "today": 0, "this_week": 0}

        now = datetime.now()
        today = now.date()
        week_ago = now - timedelta(days=7)
        today_count = week_count = 0
        for run in runs:
            try:
                timestamp = datetime.fromisoformat(run["timestamp"])
            except (KeyError, ValueError):
                continue
            if timestamp.date() == today:
                today_count += 1
            if timestamp > week_ago:
                week_count += 1

        return {
            "total": len(runs),
            "passed": sum(1 for r in runs if r.get("all_pass")),
            "today": today_count,
            "this_week": week_count,
        }

    def clear(self) -> bool:
        """Empty the history file; False when there was none."""
        if not self.history_file.exists():
            return False
        with open(self.history_file, "w") as f:
            json.dump({"runs": []}, f, indent=2)
        return True
