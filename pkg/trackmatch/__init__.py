"""
- trackmatch -
Map matching of single and multiple sparse, noisy GPS tracks on a road
network, with a synthetic-data generator and an experiment harness.
"""
