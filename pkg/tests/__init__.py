"""Tests for the fracdrift package."""
