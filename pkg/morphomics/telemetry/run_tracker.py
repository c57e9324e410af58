# morphomics/telemetry/run_tracker.py
"""
Run Tracker Module

Keeps a per-run record of batch outcomes keyed by a correlation id
(`<command>_<timestamp>_<pid>`) and mirrors it to JSON after every update:
`<run_id>.json` plus `latest_<command>.json` in the run-log directory.
Run logs are diagnostics; they carry timestamps and are not artifacts.
"""

import copy
import json
import logging
import os
import time
from datetime import datetime
from typing import Any, Dict, Optional

from morphomics.config import MORPHOMICS_RUN_LOG_DIR

logger = logging.getLogger(__name__)


class RunTracker:
    def __init__(self, log_dir: str = MORPHOMICS_RUN_LOG_DIR):
        """
        Initialize the run tracker

        Args:
            log_dir: Directory to store run logs
        """
        self.log_dir = log_dir
        os.makedirs(log_dir, exist_ok=True)
        self.active_runs: Dict[str, Dict[str, Any]] = {}

    def start_run(self, command: str, parameters: Optional[Dict[str, Any]] = None) -> str:
        """
        Start tracking a command run

        Args:
            command: CLI command name
            parameters: flag values worth keeping next to the outcome

        Returns:
            run_id: correlation id for later updates
        """
        run_id = f"{command}_{int(time.time())}_{os.getpid()}"
        self.active_runs[run_id] = {
            "run_id": run_id,
            "command": command,
            "timestamp_started": datetime.now().isoformat(),
            "parameters": parameters or {},
            "items": {},
            "results": {},
            "status": "running",
        }
        self._write_log(run_id)
        return run_id

    def record_item(self, run_id: str, item_id: str, status: str, reason: Optional[str] = None,
                    stats: Optional[Dict[str, Any]] = None):
        """
        Record the outcome of one batch item (e.g. one mask)

        Args:
            run_id: id from start_run
            item_id: batch item id
            status: "ok" or "skipped"
            reason: failure reason for skipped items
            stats: item diagnostics such as mesh statistics
        """
        if run_id not in self.active_runs:
            logger.warning(f"Run ID {run_id} not found")
            return

        self.active_runs[run_id]["items"][item_id] = {
            "timestamp": datetime.now().isoformat(),
            "status": status,
            "reason": reason,
            "stats": stats,
        }
        self._write_log(run_id)

    def record_result(self, run_id: str, key: str, value: Any):
        """Attach a run-level result (chosen config, AUC, output paths)"""
        if run_id not in self.active_runs:
            logger.warning(f"Run ID {run_id} not found")
            return
        self.active_runs[run_id]["results"][key] = value
        self._write_log(run_id)

    def finish_run(self, run_id: str, status: str = "completed"):
        if run_id not in self.active_runs:
            logger.warning(f"Run ID {run_id} not found")
            return
        run = self.active_runs[run_id]
        run["status"] = status
        run["timestamp_finished"] = datetime.now().isoformat()
        items = run["items"].values()
        run["summary"] = {
            "ok": sum(1 for item in items if item["status"] == "ok"),
            "skipped": sum(1 for item in items if item["status"] != "ok"),
        }
        self._write_log(run_id)

    def get_run(self, run_id: str) -> Optional[Dict[str, Any]]:
        return self.active_runs.get(run_id)

    def _write_log(self, run_id: str):
        """
        Write the current state of a run to its log files

        Args:
            run_id: Correlation ID of the run to log
        """
        if run_id not in self.active_runs:
            return

        run_data = self._sanitize_for_logging(self.active_runs[run_id])
        try:
            with open(os.path.join(self.log_dir, f"{run_id}.json"), 'w', encoding='utf-8') as f:
                json.dump(run_data, f, indent=2, default=str)
            with open(os.path.join(self.log_dir, f"latest_{run_data['command']}.json"), 'w', encoding='utf-8') as f:
                json.dump(run_data, f, indent=2, default=str)
        except OSError as e:
            logger.warning(f"Could not write run log for {run_id}: {str(e)}")

    def _sanitize_for_logging(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """Deep copy with numpy scalars turned into plain Python values"""
        sanitized = copy.deepcopy(data)

        def plain(value):
            if isinstance(value, dict):
                return {str(k): plain(v) for k, v in value.items()}
            if isinstance(value, (list, tuple)):
                return [plain(v) for v in value]
            if hasattr(value, 'item') and callable(value.item):
                return value.item()
            return value

        return plain(sanitized)
