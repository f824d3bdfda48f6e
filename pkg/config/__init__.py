"""Configuration settings"""

