"""Spatial-temporal pruning of streaming video tokens."""

from ._streamprune import Session, StreamPruneError, prune_frame


def open_session(tau_t, tau_s=0.5, strategy="masked", buffer_capacity=None):
    return Session(tau_t, tau_s, strategy, buffer_capacity)


__all__ = ["Session", "StreamPruneError", "open_session", "prune_frame"]
