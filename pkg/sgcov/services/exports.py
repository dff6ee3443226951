"""CSV and JSON rendering of curves, estimates, reports and sweeps."""
import csv
import io
import json
from pathlib import Path

from sgcov.models.run_config import RunConfig, dump_config

CURVE_COLUMNS = ["tau_db", "tau_linear", "coverage"]
ESTIMATE_COLUMNS = CURVE_COLUMNS + ["ci_low", "ci_high", "trials"]
REPORT_COLUMNS = ESTIMATE_COLUMNS + ["analytic", "gap"]


def _cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def columns_for(result) -> list[str]:
    rows = result.rows()
    keys = set(rows[0]) if rows else set()
    if "analytic" in keys:
        return REPORT_COLUMNS
    if "ci_low" in keys:
        return ESTIMATE_COLUMNS
    return CURVE_COLUMNS


class ExportService:
    """Service for rendering run results."""

    def rows_csv(self, rows: list[dict], columns: list[str]) -> str:
        output = io.StringIO()
        writer = csv.writer(output, lineterminator="\n")

        writer.writerow(columns)

        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])

        return output.getvalue()

    def result_csv(self, result) -> str:
        """CSV of a CoverageCurve, CoverageEstimate or ValidationReport, one row per grid point."""
        return self.rows_csv(result.rows(), columns_for(result))

    def result_payload(self, result, config: RunConfig | None = None) -> dict:
        payload = {"rows": result.rows()}
        if hasattr(result, "summary"):
            payload["summary"] = result.summary()
        details = {k: v for k, v in getattr(result, "details", {}).items()}
        if hasattr(result, "window_radius"):
            details["window_radius"] = result.window_radius
        if details:
            payload["details"] = details
        if config is not None:
            payload["config"] = dump_config(config)
        return payload

    def result_json(self, result, config: RunConfig | None = None) -> str:
        """JSON with the rows and the complete resolved config for reproduction."""
        return json.dumps(self.result_payload(result, config), indent=2, default=_json_default)

    def reports_json(self, reports: list) -> str:
        return json.dumps(
            [self.result_payload(r) for r in reports], indent=2, default=_json_default
        )

    def points_json(self, outcomes: list) -> str:
        """One payload per sweep point, each tagged with the point's values."""
        payloads = [
            {"point": point, **self.result_payload(outcome.result, outcome.config)}
            for point, outcome in outcomes
        ]
        return json.dumps(payloads, indent=2, default=_json_default)

    def write(self, text: str, path: str | Path) -> None:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")


def _json_default(value):
    # numpy scalars and arrays inside details
    if hasattr(value, "tolist"):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


# Used by every CLI command that writes output.
export_service = ExportService()
