"""scikit-learn style wrappers around contact maps and censuses."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .census import census_from_walks, run_census
from .contact import build_contact_matrix, n_pair_bits
from .entropy import entropy_report
from .lattice import DEFAULT_MAX_WALKS
from .validation import check_positive_int, check_rule, check_walks


class ContactMapTransformer(TransformerMixin, BaseEstimator):
    """Map walks to their flattened upper-triangular contact bits.

    Output columns follow the canonical linear order of pairs (0,1), (0,2),
    ..., (N-1,N). ``output="matrix"`` returns :class:`ContactMatrix` objects
    instead.
    """

    def __init__(self, rule="coincidence", output="bits"):
        self.rule = rule
        self.output = output

    def fit(self, X, y=None):
        walks = check_walks(X)
        self.rule_ = check_rule(self.rule, walks[0].model)
        self.n_positions_ = len(walks[0].points)
        self.dimension_ = walks[0].dimension
        self.n_features_out_ = n_pair_bits(self.n_positions_)
        return self

    def transform(self, X):
        check_is_fitted(self, "rule_")
        walks = check_walks(X, dimension=self.dimension_)
        if len(walks[0].points) != self.n_positions_:
            raise ValueError(f"fitted on walks with {self.n_positions_} positions, got {len(walks[0].points)}")
        mats = [build_contact_matrix(w, self.rule_) for w in walks]
        if self.output == "matrix":
            return np.array(mats, dtype=object)
        if self.output != "bits":
            raise ValueError(f"output must be 'bits' or 'matrix', got {self.output!r}")
        keys = np.frombuffer(b"".join(m.key for m in mats), dtype=np.uint8).reshape(len(mats), -1)
        return np.unpackbits(keys, axis=1)[:, : self.n_features_out_]


class CoarseGrainingCensus(BaseEstimator):
    """Contact-matrix census with its entropy summary.

    ``fit()`` without data enumerates every walk of the configured model;
    ``fit(X)`` instead uses the supplied walks as a uniform ensemble.
    After fitting, ``census_``, ``report_``, ``num_matrices_``, ``delta_`` and
    ``gamma_`` are available; ``transform`` returns the degeneracy of each
    walk's matrix and ``score`` returns delta_N.
    """

    def __init__(self, model="srw", dimension=2, length=4, rule=None, threads=1, max_walks=DEFAULT_MAX_WALKS):
        self.model = model
        self.dimension = dimension
        self.length = length
        self.rule = rule
        self.threads = threads
        self.max_walks = max_walks

    def fit(self, X=None, y=None):
        rule = check_rule(self.rule, self.model)
        if X is None:
            check_positive_int(self.length, "length")
            check_positive_int(self.dimension, "dimension", 1)
            self.census_ = run_census(self.model, self.dimension, self.length, rule,
                                      threads=self.threads, max_walks=self.max_walks)
        else:
            walks = check_walks(X, model=self.model)
            self.census_ = census_from_walks(walks, rule)
        self.rule_ = rule
        self.report_ = entropy_report(self.census_)
        self.num_matrices_ = self.census_.num_matrices
        self.delta_ = self.report_.delta
        self.gamma_ = self.report_.gamma
        return self

    def transform(self, X):
        check_is_fitted(self, "census_")
        walks = check_walks(X, model=self.census_.model, dimension=self.census_.dimension)
        return np.array([[self.census_.degeneracy_of(w)] for w in walks], dtype=np.int64)

    def score(self, X=None, y=None):
        check_is_fitted(self, "census_")
        return self.delta_
