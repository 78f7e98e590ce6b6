"""Shared pytest configuration.

Keeping a conftest at the tests root guarantees the directory is on
sys.path, so the test modules can import the local ``helpers`` module.
"""
