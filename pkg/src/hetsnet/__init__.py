"""User-to-small-cell association: games, equilibria, exact solver and learning."""

from .instance import GeometryConfig, Instance, Seed, counterexample_instance, from_gain_matrix, generate_instance
from .sinr import SILENT
from .games import GameKind, bimatrix_example, make_oracle, table_oracle
from .equilibria import find_all_pne, is_pne, poa_pos, social_welfare
from .optimal import exhaustive_optimal, solve_optimal
from .dynamics import BrdConfig, brd_multi, brd_run
from .learning import LearningConfig, mwsls_run

__version__ = "0.1.0"
