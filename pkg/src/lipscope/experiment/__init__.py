"""Orchestration of experiments: configuration, parallel execution,
and record emission.
"""
