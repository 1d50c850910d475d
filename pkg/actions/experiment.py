from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import ConfigDict, Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from harness.experiment import load_config, run_experiment

if TYPE_CHECKING:
    from core.workbench import Workbench


class ExperimentCommand(ActionRunner):
    """
    Config-driven: every further --section.field option overrides the TOML config.
    """
    model_config = ConfigDict(extra = "allow")

    config: str | None = Field(description = "TOML experiment config.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "experiment"

    @classmethod
    @override
    def description(cls) -> str:
        return "Runs pretrain, prompt-tune and eval from one config and writes the report with every checkpoint."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        report = run_experiment(load_config(self.config, self.model_extra), workbench.cache_dir, workbench.workers)
        return ActionResponse(status_code = 200, message = f"Experiment {report.fingerprint} done", fields = report.model_dump())
