"""FastRAG: schema/script-learning RAG pipeline for semi-structured text."""

__version__ = "0.1.0"
