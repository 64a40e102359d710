"""
Services for the Lord's Paradox Laboratory: Monte Carlo simulation and reporting.
"""
