"""Test suite for liftsynth."""
