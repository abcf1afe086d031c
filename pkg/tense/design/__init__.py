from tense.design.sequential import DesignResult, DesignState, embedded_distance, sequential_design
from tense.design.points import fault_height, ghost_points, straddle_pairs
from tense.design.uci import UciSpec, uci_region, uci_value
