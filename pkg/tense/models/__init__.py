from tense.models.geometry import (
    domain_of,
    olympus_ghost_boundary,
    region_id,
    region_ids,
    toy_grid_design,
)
from tense.models.functions import eval_test_function, evaluate
from tense.models.surfaces import builtin_embedding, surface_from_config
from tense.models.npv import NpvParams, npv
from tense.models.replicates import replicate_matrix, synthetic_replicates
