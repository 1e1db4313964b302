"""Tests for qinstantiate."""
