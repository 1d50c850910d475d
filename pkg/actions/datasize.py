from typing import TYPE_CHECKING
from typing_extensions import override

from pydantic import Field

from core.action_response import ActionResponse
from core.action_runner import ActionRunner
from unitizer.datasize import SSL_DIM, data_size_bits

if TYPE_CHECKING:
    from core.workbench import Workbench

COMPARISON_FORMATS = ("waveform", "ssl", "units(100)", "units(1000)")


class DatasizeCommand(ActionRunner):
    format: str = Field(description = "waveform, ssl, units(c), or all for the comparison table.", default = "all")
    seconds: float = Field(description = "Duration in seconds.", default = 1.0, ge = 0)
    clusters: int | None = Field(description = "Cluster count for a plain units format.", default = None)
    ssl_dim: int = Field(description = "SSL feature width.", default = SSL_DIM, ge = 1)

    @classmethod
    @override
    def discriminator(cls) -> str:
        return "datasize"

    @classmethod
    @override
    def description(cls) -> str:
        return "Bits needed to store speech as waveform, SSL features or discrete units."

    @override
    async def run(self, workbench: "Workbench") -> ActionResponse:
        formats = COMPARISON_FORMATS if self.format == "all" else (self.format,)
        sizes = [data_size_bits(name, self.seconds, self.clusters, self.ssl_dim).model_dump() for name in formats]
        return ActionResponse(status_code = 200, fields = {"sizes": sizes})
