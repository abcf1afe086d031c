from tense.embedding.surface import (
    EmbeddingSurface,
    Piece,
    embed,
    embed_points,
    finite_difference_gradient,
    on_tear,
    surface_gradient,
    surface_gradients,
    tear_distance,
)
from tense.embedding.metric import (
    LocalMetric,
    local_metric,
    local_metrics,
    metric_from_gradient,
    sigma3d_closed_form,
    tangent_basis,
    tangent_map,
)
from tense.embedding.piecewise import piecewise_surface
