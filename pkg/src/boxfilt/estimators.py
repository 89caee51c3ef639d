"""scikit-learn style wrappers around the filtrations and the box mapper."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .baselines import DtmParams, dtm_filtration, vr_filtration
from .complex import PersistenceDiagram, persistence
from .filtration import DEFAULT_MAX_STEPS, box_filtration
from .mapper import box_mapper

__all__ = ["BoxFiltration", "VietorisRips", "DTMFiltration", "BoxMapper", "diagram_array"]


def diagram_array(dgm: PersistenceDiagram) -> np.ndarray:
    """``(k, 3)`` array of ``(dim, birth, death)`` rows."""
    return np.column_stack([dgm.dims.astype(float), dgm.births, dgm.deaths]).reshape(-1, 3)


def _points(X) -> np.ndarray:
    return check_array(X, dtype=float, ensure_min_samples=1)


class _DiagramTransformer(TransformerMixin, BaseEstimator):
    """Shared fit/transform: ``fit`` keeps the diagram of X, ``transform`` returns one for X."""

    def _diagram(self, X) -> tuple[PersistenceDiagram, dict]:
        raise NotImplementedError

    def fit(self, X, y=None):
        X = _points(X)
        self.diagram_, extras = self._diagram(X)
        for k, v in extras.items():
            setattr(self, k, v)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "diagram_")
        X = _points(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return diagram_array(self._diagram(X)[0])


class BoxFiltration(_DiagramTransformer):
    """Persistence of the box filtration of a point cloud.

    After ``fit``: ``diagram_``, ``cover_`` (the :class:`CoverSequence`),
    ``complex_`` and ``n_steps_``.
    """

    def __init__(self, alpha=0.5, pi=1.0, cover="point", pixel_width=None, k=None, max_dim=2,
                 merge_radius=None, max_steps=DEFAULT_MAX_STEPS, threads=1):
        self.alpha = alpha
        self.pi = pi
        self.cover = cover
        self.pixel_width = pixel_width
        self.k = k
        self.max_dim = max_dim
        self.merge_radius = merge_radius
        self.max_steps = max_steps
        self.threads = threads

    def _diagram(self, X):
        seq, cx, dgm = box_filtration(X, self.alpha, self.pi, cover=self.cover,
                                      pixel_width=self.pixel_width, k=self.k, max_dim=self.max_dim,
                                      merge_radius=self.merge_radius, max_steps=self.max_steps,
                                      threads=self.threads)
        return dgm, {"cover_": seq, "complex_": cx, "n_steps_": seq.m}


class VietorisRips(_DiagramTransformer):
    def __init__(self, max_scale=None, max_dim=2):
        self.max_scale = max_scale
        self.max_dim = max_dim

    def _diagram(self, X):
        cx = vr_filtration(X, self.max_scale, self.max_dim)
        return persistence(cx, self.max_dim - 1), {"complex_": cx}


class DTMFiltration(_DiagramTransformer):
    def __init__(self, m=0.1, max_scale=None, max_dim=2):
        self.m = m
        self.max_scale = max_scale
        self.max_dim = max_dim

    def _diagram(self, X):
        cx = dtm_filtration(X, DtmParams(self.m), self.max_scale, self.max_dim)
        return persistence(cx, self.max_dim - 1), {"complex_": cx}


class BoxMapper(BaseEstimator):
    """Box mapper graph; ``predict`` gives the first node whose box holds each point (-1 if none)."""

    def __init__(self, k=8, pi=1.0, alpha=0.1, seed=0, cover="point", pixel_width=None):
        self.k = k
        self.pi = pi
        self.alpha = alpha
        self.seed = seed
        self.cover = cover
        self.pixel_width = pixel_width

    def fit(self, X, y=None):
        X = _points(X)
        self.graph_ = box_mapper(X, self.k, self.pi, self.alpha, self.seed, self.cover, self.pixel_width)
        self.labels_ = self.graph_.labels
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "graph_")
        X = _points(X)
        out = np.full(len(X), -1, dtype=int)
        for i, box in reversed(list(enumerate(self.graph_.boxes))):
            out[box.contains_points(X)] = i
        return out
