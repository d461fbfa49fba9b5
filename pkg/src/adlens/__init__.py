"""adlens: weakly supervised analysis of political ad archives.

Pipeline pieces: ad-archive ingestion and dedup (corpus), PMI issue
lexicons (lexicon), funding-entity stance rules (weaklabel), a typed
ad/entity/label graph (graph), joint embedding training with negative
sampling (embed), similarity inference and evaluation (infer), and the
statistical toolbox used by the analyses (stats, analysis).
"""

__version__ = "0.1.0"
