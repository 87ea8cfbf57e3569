"""
Command-line controllers.
"""
