from setuptools import setup, find_packages

setup(
    name="spectrasphere",
    version="0.1.0",
    packages=find_packages(where="src", exclude=["tests", "tests.*"]),
    package_dir={"": "src"},
    python_requires=">=3.8",
    install_requires=[
        "pandas>=1.5",
        "pyyaml",
        "numpy",
        "scipy>=1.7",
        "scikit-learn>=1.0",
        "joblib>=1.0",
    ],
    entry_points={
        "console_scripts": [
            "spectrasphere=spectrasphere.__main__:main",
        ],
    },
)
