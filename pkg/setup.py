from setuptools import setup, find_packages


def get_version():
    main_ns = {}
    with open("jamlab/_version.py") as ver_file:
        exec(ver_file.read(), main_ns)
    return main_ns["__version__"]


setup(
    name="jamlab",
    version=get_version(),
    packages=find_packages(exclude=("tests.*", "tests")),
    package_data={"jamlab": ["py.typed"]},
    license="MIT",
    description="Random sequential adsorption and annihilation experiments: simulation, exact oracles and asymptotics",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    install_requires=["pydantic>=2", "numpy>=1.17", "pandas>=1.5"],
    python_requires=">=3.8",
    entry_points={"console_scripts": ["jamlab=jamlab.cli:main"]},
    keywords=["random sequential adsorption", "jamming", "annihilation", "monte carlo", "lattice"],
    classifiers=[
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
        "Typing :: Typed",
        "Development Status :: 4 - Beta",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
    ],
)
