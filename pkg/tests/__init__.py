"""Test suite for LPHedgeBot."""
