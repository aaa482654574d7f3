"""Tests for the operator Hölder laboratory."""
