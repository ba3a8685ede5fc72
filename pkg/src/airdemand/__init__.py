"""Hybrid metaheuristic regressors for air demand in dam bottom outlets.

ANN-GA, ANN-PSO and ANFIS-PSO models trained on (water volume rate, gate
opening) -> air velocity, plus a Kalinske-based synthetic data generator.
"""

__version__ = "0.1.0"
