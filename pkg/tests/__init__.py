"""Test suite for Gmail Classifier."""
