import json
import sys
import time
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Dict, Optional

import aiofiles
import psutil


class RunMetrics:
    """
    Collects timing and resource usage for one verification run.
    Features:
      - Per-check wall time and sample counts
      - Process memory and CPU snapshots after each check
      - Summary printout and JSON export
    """

    def __init__(self, metrics_file: str = "data/run_metrics.json", enabled: bool = True):
        self.metrics_file = Path(metrics_file)
        self.enabled = enabled
        self.metrics = {
            "checks": [],  # one record per check
            "memory_usage": [],  # snapshots taken after each check
            "start_time": time.time(),
        }

    def _snapshot(self) -> Dict[str, float]:
        try:
            process = psutil.Process()
            return {
                "process_memory_mb": process.memory_info().rss / 1024 / 1024,
                "process_cpu_percent": process.cpu_percent(),
                "system_memory_percent": psutil.virtual_memory().percent,
            }
        except Exception as e:
            print(f"❌ Error checking memory usage: {e}", file=sys.stderr)
            return {}

    def record_check(self, name: str, duration: float, points: int, passed: bool) -> None:
        """Record one finished check."""
        if not self.enabled:
            return
        now = time.time()
        self.metrics["checks"].append(
            {"timestamp": now, "name": name, "duration": duration, "points": points, "pass": passed}
        )
        snapshot = self._snapshot()
        if snapshot:
            self.metrics["memory_usage"].append({"timestamp": now, **snapshot})

    def get_run_stats(self) -> Dict[str, Any]:
        elapsed = time.time() - self.metrics["start_time"]
        checks = self.metrics["checks"]
        total_points = sum(c["points"] for c in checks)
        check_time = sum(c["duration"] for c in checks)
        slowest = max(checks, key=lambda c: c["duration"]) if checks else None
        recent = self.metrics["memory_usage"][-1] if self.metrics["memory_usage"] else {}
        return {
            "elapsed_seconds": elapsed,
            "elapsed_formatted": str(timedelta(seconds=int(elapsed))),
            "total_checks": len(checks),
            "failed_checks": sum(1 for c in checks if not c["pass"]),
            "total_points": total_points,
            "points_per_second": total_points / check_time if check_time > 0 else 0.0,
            "slowest_check": slowest["name"] if slowest else None,
            "memory_usage_mb": recent.get("process_memory_mb", 0),
        }

    def print_summary(self) -> None:
        stats = self.get_run_stats()
        out = sys.stderr
        print("\n" + "=" * 60, file=out)
        print("📊 RUN SUMMARY", file=out)
        print("=" * 60, file=out)
        print(f"⏱️  Elapsed: {stats['elapsed_formatted']}", file=out)
        print(f"🧪 Checks: {stats['total_checks']} ({stats['failed_checks']} failed)", file=out)
        print(f"📈 Sample points: {stats['total_points']} ({stats['points_per_second']:.0f}/s)", file=out)
        if stats["slowest_check"]:
            print(f"🐢 Slowest check: {stats['slowest_check']}", file=out)
        print(f"💾 Memory: {stats['memory_usage_mb']:.1f} MB", file=out)
        print("=" * 60, file=out)

    async def save_metrics(self, parameters: Optional[dict] = None) -> None:
        """Write the collected metrics and final stats as JSON."""
        if not self.enabled:
            return
        try:
            self.metrics_file.parent.mkdir(parents=True, exist_ok=True)
            data = {
                "parameters": parameters or {},
                "run_metrics": self.metrics,
                "final_stats": self.get_run_stats(),
                "exported_at": datetime.now().isoformat(),
            }
            async with aiofiles.open(self.metrics_file, "w") as f:
                await f.write(json.dumps(data, indent=2, default=str))
        except Exception as e:
            print(f"❌ Error saving run metrics: {e}", file=sys.stderr)
