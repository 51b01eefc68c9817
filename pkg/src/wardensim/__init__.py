"""wardensim: adaptive covert-channel endpoints vs traffic-normalizing wardens.

A deterministic discrete-event simulator. Covert endpoints probe a pool of
50 header-field storage channels through an inline warden, keep a list of
channels currently surviving normalization, and stream covert payload over
them; wardens counter with static, periodically reshuffled, or fully
randomized normalization rulesets.
"""

from .channels import CHANNEL_COUNT, ChannelSpec, Mode, catalog, decode, encode
from .endpoints import EndpointTiming, SenderStrategy
from .experiments import (
    Aggregate,
    ScenarioConfig,
    emit_csv,
    run_scenario,
    run_table1,
    sweep_fr,
)
from .packets import FieldId, Packet, PacketKind, default_packet, get_field, set_field
from .rules import Disposition, apply_ruleset, rule_for_channel
from .simkernel import LinkConfig, TrialResult, TrialTimeout, run_trial
from .warden import (
    DynamicWarden,
    NoWarden,
    RandomDynamicWarden,
    RegularWarden,
    Warden,
    variant_warden,
)

__version__ = "0.1.0"

__all__ = [
    "Aggregate",
    "CHANNEL_COUNT",
    "ChannelSpec",
    "Disposition",
    "DynamicWarden",
    "EndpointTiming",
    "FieldId",
    "LinkConfig",
    "Mode",
    "NoWarden",
    "Packet",
    "PacketKind",
    "RandomDynamicWarden",
    "RegularWarden",
    "ScenarioConfig",
    "SenderStrategy",
    "TrialResult",
    "TrialTimeout",
    "Warden",
    "apply_ruleset",
    "catalog",
    "decode",
    "default_packet",
    "emit_csv",
    "encode",
    "get_field",
    "rule_for_channel",
    "run_scenario",
    "run_table1",
    "run_trial",
    "set_field",
    "sweep_fr",
    "variant_warden",
    "__version__",
]
