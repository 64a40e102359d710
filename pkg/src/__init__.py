"""
Lord's Paradox Laboratory.

Simulates the weight example from its structural causal model, runs the six
analytical approaches to the boy-vs-girl contrast, decomposes change scores
and emits the Table 1 and Figure 3 artifacts.
"""

__version__ = "0.1.0"
