"""The current version number. Uses semantic versioning (https://semver.org)"""

__version__ = "0.1.0-dev"
