"""Router toolbox: explicit router graphs, online pruning, short-path
demand routing, decremental clustering, witnesses, sparsified routers,
fault-tolerant routing, and spanner extraction, all with exact
rational verification."""

__version__ = "0.1.0"
