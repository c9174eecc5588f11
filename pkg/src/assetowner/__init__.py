"""Asset-ownership prediction toolkit.

Engineers categorical features from CMDB network identifiers (FQDN, CIDR
prefixes, MAC OUI), trains five classifier families one-vs-rest per owner
under Monte Carlo cross validation, and publishes JSON artifacts consumed by
an analyst dashboard.
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
