"""Opacity verification and enforcement by event insertion against multiple intruders."""

from .ais import Ais, AisNode, build_ais, check_private_enforceability, extract_local_insertion, prune_ais
from .insertion import InsertionStrategy, ModifiedWord, apply_insertion, identity_strategy
from .joint import (
    JointState,
    check_joint_enforceability,
    expand_intermediates,
    is_joint_safe,
    joint_estimate,
    prune_product,
    synthesize_joint,
)
from .model import Model, ModelError, enumerate_language, load_model, parse_model, project, serialize_model
from .nfm import Nfm, ProductNfm, ais_to_nfm, build_global_observer, compose_product, product_for
from .observer import Observer, build_observer, estimate, revealing_states, unobservable_reach
from .opacity import Verdict, coordinated_estimate, is_safe_output, verify_cso, verify_dcso, verify_jcso_plain
from .runtime import Trace, extract_joint_strategy, simulate_run

__version__ = "0.1.0"
