from setuptools import setup, find_packages

exec(open("maccanon/_version.py", encoding="utf-8").read())

LONG_DESC = open("README.rst", encoding="utf-8").read()

setup(
    name="maccanon",
    version=__version__,
    description=(
        "Rate maximization, energy minimization and admission control "
        "for the multi-tone MIMO multiple-access channel"
    ),
    long_description=LONG_DESC,
    license="MIT -or- Apache License 2.0",
    packages=find_packages(),
    install_requires=["numpy>=1.17", "scipy>=1.4", "trio"],
    entry_points={"console_scripts": ["maccanon=maccanon._cli:main"]},
    keywords=[
        "MIMO",
        "multiple access channel",
        "successive interference cancellation",
        "ellipsoid method",
        "water-filling",
    ],
    python_requires=">=3.8",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "License :: OSI Approved :: Apache Software License",
        "Framework :: Trio",
        "Operating System :: POSIX :: Linux",
        "Operating System :: MacOS :: MacOS X",
        "Operating System :: Microsoft :: Windows",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: Implementation :: CPython",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
