"""Package setup for CDANs."""

from setuptools import setup, find_packages

setup(
    name="cdans",
    version="0.1.0",
    description="Constraint-based causal discovery for autocorrelated and non-stationary time series",
    python_requires=">=3.10",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "networkx>=3.0",
    ],
    extras_require={
        "dev": ["pytest>=7.0.0"],
    },
    entry_points={
        "console_scripts": [
            "cdans=runner.main:main",
        ],
    },
)
