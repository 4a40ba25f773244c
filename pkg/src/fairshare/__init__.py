"""Share-based fair division of indivisible goods and chores under arbitrary entitlements."""
from .core import (CHORES, GOODS, AdditiveValuation, Agent, Allocation, Instance, InstanceError,
                   ResourceCapExceeded, format_rational, parse_instance, serialize_instance, to_rational)
from .shares import (ShareKind, chores_mms, mms, mms_bar, mms_hat, proportional_share, ps_bar, ps_hat,
                     rrr_share, share_value, sylvester, tps, tps_hat, unit_lower_bound, unit_upper_bound)

__version__ = "0.1.0"

__all__ = [
    "CHORES", "GOODS", "AdditiveValuation", "Agent", "Allocation", "Instance", "InstanceError",
    "ResourceCapExceeded", "format_rational", "parse_instance", "serialize_instance", "to_rational",
    "ShareKind", "chores_mms", "mms", "mms_bar", "mms_hat", "proportional_share", "ps_bar", "ps_hat",
    "rrr_share", "share_value", "sylvester", "tps", "tps_hat", "unit_lower_bound", "unit_upper_bound",
]
