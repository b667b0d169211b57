"""Meta-learning toolkit: builds a knowledge base of pipeline evaluations
over many datasets and recommends classifier configurations for new ones."""

__version__ = "0.1.0"
