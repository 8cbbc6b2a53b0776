#!/usr/bin/python3
import os

from setuptools import find_packages, setup

with open("README.md", "r") as fh:
    long_description = fh.read()

if os.environ.get("BOOSTREC_LIB", "0") == "1":
    requirements_filename = "requirements.in"
else:
    requirements_filename = "requirements.txt"

with open(requirements_filename, "r") as f:
    requirements = [i.split("#")[0].strip() for i in f.read().split("\n")]
    requirements = [i for i in requirements if i]

setup(
    name="boostrec",
    packages=find_packages(exclude=["tests", "tests.*"]),
    version="0.3.0",  # don't change this manually, use bumpversion instead
    license="MIT",
    description="Saliency-boosted 3D object recognition with local descriptors and a benchmark suite.",  # noqa: E501
    long_description=long_description,
    long_description_content_type="text/markdown",
    keywords=["point cloud", "object recognition", "saliency", "local descriptors"],
    install_requires=requirements,
    entry_points={"console_scripts": ["boostrec=boostrec._cli.__main__:main"]},
    include_package_data=True,
    package_data={"boostrec": ["data/*.yaml"]},
    python_requires=">=3.8,<4",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Image Recognition",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
    ],
)
