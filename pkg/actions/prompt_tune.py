from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import ConfigDict, Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from harness.experiment import load_config, output_directory, save_setup, tune_for_config
from prompts.accounting import count_trainable

if TYPE_CHECKING:
    from core.workbench import Workbench


class PromptTuneCommand(ActionRunner):
    """
    Config-driven: every further --section.field option overrides the TOML config.
    """
    model_config = ConfigDict(extra = "allow")

    config: str | None = Field(description = "TOML experiment config.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "prompt-tune"

    @classmethod
    @override
    def description(cls) -> str:
        return "Freezes the configured backbone, tunes prompts (and a learnable verbalizer) and saves them."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        config = load_config(self.config, self.model_extra)
        setup = tune_for_config(config)
        paths = save_setup(setup, output_directory(config, workbench.cache_dir))
        counts = count_trainable(setup.tuning.prompts, setup.tuning.verbalizer)
        return ActionResponse(
            status_code = 200,
            message = f"Tuned prompts for {setup.splits.task.name} in {setup.tuning.steps} steps",
            fields = {
                **paths,
                "steps": setup.tuning.steps,
                "best_valid_loss": setup.tuning.best_valid_loss,
                "stopped_early": setup.tuning.stopped_early,
                "trainable_parameters": counts.total,
                "prompt_parameters": counts.prompts,
            }
        )
