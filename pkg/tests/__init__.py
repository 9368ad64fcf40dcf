"""Unit test package for tate_derham."""
