"""Curation toolchain for code-review datasets.

Ingests review corpora, scores and categorizes comments with an LLM judge,
filters and reformulates them, measures human/LLM agreement, and exports
downstream-task datasets with BLEU / CodeBLEU / Exact-Match evaluation.
"""

__version__ = "0.1.0"
