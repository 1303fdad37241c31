"""Test package for metatrace."""
