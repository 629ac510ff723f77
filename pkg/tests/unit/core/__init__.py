"""
Tests для core-модулей.
"""