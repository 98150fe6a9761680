"""
Setup script for toral-mass
"""
import os
from setuptools import setup, find_packages

setup(
    name="toral-mass",
    version="0.1.0",
    description="Exact and Monte Carlo L2-mass statistics of toral Laplace eigenfunctions at Planck scale",
    long_description=open("README.md").read() if os.path.exists("README.md") else "",
    long_description_content_type="text/markdown",
    packages=find_packages(include=["toral_mass", "toral_mass.*"]),
    install_requires=[
        "numpy>=1.22",
        "scipy>=1.8",
        "blinker==1.8.2",
        "python-dateutil==2.8.2",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "toral-mass=toral_mass.cli:main",
        ],
    },
    python_requires=">=3.9",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
