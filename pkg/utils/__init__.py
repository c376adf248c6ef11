"""
elw-lab - Utility Modules

This package contains the matrix codec shared by configs and reports.
"""
