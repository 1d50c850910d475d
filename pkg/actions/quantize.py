from pathlib import Path
from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from core.errors import MissingArtifactError
from unitizer.feature_io import read_features
from unitizer.kmeans import kmeans_fit, quantize
from unitizer.units import deduplicate, write_unit_file
from unitlm.checkpoint import load_quantizer, read_artifact, save_quantizer, write_artifact

if TYPE_CHECKING:
    from core.workbench import Workbench


class QuantizeCommand(ActionRunner):
    """
    Turns frame features into unit sequences. With --model a saved quantizer is applied as is; without it a new
    k-means quantizer is fitted on the same features and saved first.
    """
    features: str = Field(description = "An SPFM feature file, or a directory of *.spfm files.", alias = "in")
    model: str | None = Field(description = "Saved quantizer; a new one is fitted on --in when unset.", default = None)
    out: str | None = Field(description = "Unit file to write, one utterance per line.", default = None)
    dedup: bool = Field(description = "Collapse repeated units in the unit file.", default = False)
    k: int = Field(description = "Number of clusters when fitting.", default = 100, ge = 1)
    seed: int = Field(description = "k-means++ seed when fitting.", default = 0)
    max_iters: int = Field(description = "Lloyd iteration cap when fitting.", default = 100, ge = 1)
    output: str | None = Field(description = "Where a fitted quantizer is saved; quantizer.spul in the cache when unset.", default = None)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "quantize"

    @classmethod
    @override
    def description(cls) -> str:
        return "Quantizes frame features into unit sequences with a saved or freshly fitted k-means model."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        source = Path(self.features)
        if source.is_dir():
            paths = sorted(source.glob("*.spfm"))
        elif source.is_file():
            paths = [source]
        else:
            raise MissingArtifactError(f"features not found: {source}")
        if not paths:
            raise MissingArtifactError(f"no *.spfm files in {source}")
        matrices = [read_features(path) for path in paths]

        fields: dict[str, object] = {"frames": sum(matrix.shape[0] for matrix in matrices)}
        if self.model is not None:
            model = load_quantizer(read_artifact(self.model))
            fields["quantizer"] = self.model
            message = f"Quantized {len(matrices)} utterances with {model.k} clusters"
        else:
            model = kmeans_fit(matrices, self.k, self.max_iters, self.seed)
            output = write_artifact(self.output or workbench.artifact("quantizer.spul"), save_quantizer(model))
            fields.update({
                "quantizer": str(output),
                "iterations": len(model.inertia_history),
                "inertia": model.inertia_history[-1],
            })
            message = f"Fitted {model.k} clusters"
        fields["k"] = model.k

        if self.out is not None:
            utterances = [quantize(model, matrix) for matrix in matrices]
            if self.dedup:
                utterances = [deduplicate(units) for units in utterances]
            write_unit_file(self.out, utterances)
            fields["units"] = self.out
            fields["utterances"] = len(utterances)
        return ActionResponse(status_code = 200, message = message, fields = fields)
