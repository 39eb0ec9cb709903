"""Optimistic tree search with random embeddings for high-dimensional black-box problems."""
from .embedding import (BudgetExhausted, EvaluationRecord, GaussianMatrix, MatrixTag,
                        StochasticObjective, evaluate_stochastic, project, sample_matrix)
from .functions import Objective, estimate_lipschitz, make_function, regret
from .optimizers import (OptimizerConfig, RunResult, embedded_hunter, random_search, resoo, soo,
                         sresoo)
from .spaces import BoxSpace, RngStream, l2_norm, make_low_space

__version__ = "0.1.0"
