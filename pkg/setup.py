"""
Legacy setup.py for tooling that still invokes it.
Metadata, dependencies and the nematic-colloids entry point live in pyproject.toml.
"""

from setuptools import setup

if __name__ == "__main__":
    setup()
