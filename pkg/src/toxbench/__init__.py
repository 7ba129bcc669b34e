"""toxbench: a reproducible bioactivity-benchmark evaluation platform.

Layers, bottom up:

    chem        SMILES parsing into validated molecular graphs
    featurize   9,385-wide feature vectors and the fit/apply pipeline
    dataset     12-endpoint sparse label matrices, CSV I/O, split audits
    metrics     masked per-endpoint ROC-AUC and median/MAD aggregation
    models      linear / SNN / Tanimoto-KNN baselines, LLM prompt adapter
    protocol    the /predict JSON wire contract and its validation
    serve       HTTP model server
    orchestrate remote evaluation: batching, retries, completeness, scoring
    registry    submission lifecycle, event-sourced store, leaderboard API
    synthetic   seeded molecule/dataset fixtures
    cli         one command-line entry point over all of the above
"""

__version__ = "0.1.0"
