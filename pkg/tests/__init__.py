"""Tests for the prodsketch runtime, protocols and harness."""
