"""Tests for fluxspin."""
