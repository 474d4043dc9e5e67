"""Hard-instance generators with planted ground truth."""

from .disj import DisjEmbedding, gen_disj_embedding, gen_gapinf_embedding
from .io import InstancePaths, StoredInstance, load_instance, save_instance
from .join import JoinInstance, gen_join_instance
from .sum_instance import SumInstance, default_sum_k, gen_sum_instance, sum_beta

__all__ = [
    "DisjEmbedding",
    "InstancePaths",
    "JoinInstance",
    "StoredInstance",
    "SumInstance",
    "default_sum_k",
    "gen_disj_embedding",
    "gen_gapinf_embedding",
    "gen_join_instance",
    "gen_sum_instance",
    "load_instance",
    "save_instance",
    "sum_beta",
]
