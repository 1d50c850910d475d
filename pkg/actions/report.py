from pathlib import Path
from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.errors import MissingArtifactError
from harness.experiment import REPORT_FILE, read_report, write_report_table

if TYPE_CHECKING:
    from core.workbench import Workbench


class ReportCommand(ActionRunner):
    directory: str | None = Field(description = "Directory searched for report.json files; the cache's experiments when unset.", default = None)
    output: str | None = Field(description = "CSV path; reports.csv in the cache when unset.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "report"

    @classmethod
    @override
    def description(cls) -> str:
        return "Collects experiment reports into one CSV table."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        directory = Path(self.directory) if self.directory is not None else workbench.cache_dir / "experiments"
        paths = sorted(directory.rglob(REPORT_FILE)) if directory.is_dir() else []
        if not paths:
            raise MissingArtifactError(f"no {REPORT_FILE} under {directory}")
        reports = [read_report(path) for path in paths]
        table = write_report_table(reports, self.output or workbench.artifact("reports.csv"))
        return ActionResponse(status_code = 200, message = f"Tabulated {len(reports)} reports", fields = {"csv": str(table), "reports": len(reports)})
