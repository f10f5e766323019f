import logging
from enum import Enum
from pathlib import Path

from fidelium.config import get_settings
from fidelium.core.channels import (
    KrausChannel,
    dephasing,
    depolarizing,
    random_channel,
    unitary_channel,
)
from fidelium.core.haar import SampleStream, sample_unitary
from fidelium.core.tensor_core import ComplexMatrix, require_unitary
from fidelium.errors import DimensionMismatchError, UsageError
from fidelium.schemas import ChannelFile, GateFile, read_model, write_model

logger = logging.getLogger(__name__)


class ChannelKind(str, Enum):
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    UNITARY_RANDOM = "unitary-random"
    KRAUS_RANDOM = "kraus-random"


class ChannelService:
    def __init__(self, tp_tol: float | None = None):
        settings = get_settings()
        self.tp_tol = tp_tol or settings.tp_tol
        self.default_seed = settings.seed

    def load_channel(self, path: str | Path, tp_tol: float | None = None) -> KrausChannel:
        """Load a channel file, rejecting it when trace preservation fails beyond tp_tol."""
        document = read_model(path, ChannelFile)
        channel = document.to_channel(tp_tol or self.tp_tol)
        logger.info(f"Loaded channel {path}: d={channel.dim}, rank={channel.rank}, tp residual={channel.tp_residual:.2e}")
        return channel

    def save_channel(self, channel: KrausChannel, path: str | Path) -> Path:
        return write_model(path, ChannelFile.from_channel(channel))

    def load_gate(self, path: str | Path, dim: int | None = None) -> ComplexMatrix:
        gate = require_unitary(read_model(path, GateFile).to_matrix())
        if dim is not None and gate.shape[0] != dim:
            raise DimensionMismatchError("gate and channel dimensions differ", gate_dim=gate.shape[0], dim=dim)
        return gate

    def generate(
        self,
        kind: ChannelKind | str,
        dim: int,
        p: float | None = None,
        k: int | None = None,
        seed: int | None = None,
    ) -> KrausChannel:
        """Build one of the standard channels; invalid parameters are usage errors."""
        kind = ChannelKind(kind)
        seed = self.default_seed if seed is None else seed
        if dim < 2:
            raise UsageError("channel dimension must be at least 2", dim=dim)
        if seed < 0:
            raise UsageError("seed must be non-negative", seed=seed)

        if kind in (ChannelKind.DEPOLARIZING, ChannelKind.DEPHASING):
            if p is None and kind is ChannelKind.DEPHASING:
                p = 0.5
            if p is None or not 0.0 <= p <= 1.0:
                raise UsageError(f"{kind.value} needs --p in [0, 1]", p=p)
            build = depolarizing if kind is ChannelKind.DEPOLARIZING else dephasing
            channel = build(dim, p)
        elif kind is ChannelKind.UNITARY_RANDOM:
            channel = unitary_channel(sample_unitary(SampleStream(seed, 0, dim)))
        else:
            k = 1 if k is None else k
            if k < 1:
                raise UsageError("kraus-random needs --k >= 1", k=k)
            channel = random_channel(dim, k, seed)

        logger.info(f"Generated {kind.value} channel: d={dim}, rank={channel.rank}")
        return channel


_channel_service: ChannelService | None = None


def get_channel_service() -> ChannelService:
    global _channel_service
    if _channel_service is None:
        _channel_service = ChannelService()
    return _channel_service
