from setuptools import setup


setup(
    version="1.0.0",
    name="trackmatch",
    description="map matching of single and multiple sparse GPS tracks",
    author="LZV.nrw",
    install_requires=[
        "numpy>=1.26,<3",
        "scipy>=1.11,<2",
        "networkx>=3.1,<4",
        "PyYAML==6.*",
        "data-plumber-http>=1.0.0,<2",
        "dcm-common>=4.0.0,<5",
    ],
    packages=[
        "trackmatch",
        "trackmatch.components",
        "trackmatch.models",
    ],
    entry_points={
        "console_scripts": [
            "trackmatch = trackmatch.cli:main",
        ],
    },
    include_package_data=True,
    setuptools_git_versioning={
        "enabled": True,
        "version_file": "VERSION",
        "count_commits_from_version_file": True,
        "dev_template": "{tag}.dev{ccount}",
    },
)
