"""
fanforge backend: settings, catalog, CLI and HTTP app over the services package.
"""
__version__ = "1.0.0"
