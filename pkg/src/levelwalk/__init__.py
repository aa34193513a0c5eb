"""Level-set traversal toolkit: train small networks to near-zero training
loss, walk the fixed-loss level set toward maximally regularized parameters,
and compare against a weight-decay baseline."""

__version__ = "0.1.0"
