"""Meta-planning for tabular MDPs: choose where to think, not just what to do."""

from .mdp import (BackupOperator, Policy, TabularMdp, Trajectory,
                  ValueIterationResult, discounted_occupancy, greedy_path,
                  sample_trajectory, value_iteration)
from .maze import (ACTIONS, FOUR_ROOMS_DOORWAYS, GridMaze, MazeError,
                   MazeParseError, SYMMETRIES, UnreachableGoalError,
                   apply_symmetry, build_four_rooms, maze_to_mdp,
                   optimal_plan_length, parse_maze, serialize_maze)
from .softplan import (PartialPlan, PlanSlice, TemperatureField, inv_softplus,
                       plan_all_states, plan_cost, soft_bellman_rollout,
                       soft_value_iteration, softplus)
from .metaplanner import (MetaPlanConfig, MetaPlanResult, ParetoPoint,
                          evaluate_meta_value, meta_loss_and_gradient,
                          optimize, pareto_sweep)
from .baselines import (AStarResult, ItbrResult, astar, astar_node_difference,
                        itbr_first_step_cost, itbr_values,
                        soft_bellman_entropy, softmax_entropy,
                        trajectory_turns, vi_iterations)
from .probes import (TeleportEvent, partial_plan_divergence,
                     simulate_teleport_events, teleport_distance)
from .analysis import (Dendrogram, cut, ols_fit, plan_distance_matrix,
                       symmetric_planning_distance, ward_cluster)
from .stimuli import (SelectionResult, expand_with_symmetries, generate_mazes,
                      select_spanning_costs, start_plan_cost)
from .render import render_heatmap_svg

__version__ = "0.1.0"
