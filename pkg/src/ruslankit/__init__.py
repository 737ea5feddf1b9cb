"""Corpus construction, analysis and copy-synthesis tooling for a
single-speaker Russian TTS corpus."""

__version__ = "0.1.0"
