#!/usr/bin/env python3
import setuptools

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="pscale",
    version="0.1",
    description="Scaling sequences and limit models for rigid pseudoconvex domains of finite type",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.10",
    test_suite="tests",
    install_requires=[
        "aioitertools >= 0.11",
        "numpy >= 1.24",
        "pydantic >= 2.0",
        "polars >= 0.20",
    ],
    tests_require=["pytest", "pytest-cov", "hypothesis >= 6.0", "sympy >= 1.12"],
    extras_require={
        "test": ["pytest", "pytest-cov", "hypothesis >= 6.0", "sympy >= 1.12"],
    },
    entry_points={"console_scripts": ["pscale=pscale.cli:main"]},
)
