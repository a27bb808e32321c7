"""Exact-arithmetic engine for the Bargmann-Wigner spin-2 construction."""

from __future__ import annotations

__version__ = "0.1.0"
