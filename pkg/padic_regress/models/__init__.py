"""
Pydantic models for trainer and command configuration.
"""
