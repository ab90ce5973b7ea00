"""Reference-free multi-dimensional evaluation for retrieval-augmented answers.

Subsystems: synthetic dataset generation (`dataset`), exact retrieval
(`corpus`), the model gateway and its deterministic mock (`gateway`, `mock`),
claim extraction (`claims`), the four metric engines (`specificity`,
`robustness`, `relevance`, `context_use`), deterministic text statistics
(`readability`, `agreement`), the run orchestrator (`pipeline`, `cli`) and
the human annotation service (`annotation`).
"""

__version__ = "0.1.0"
