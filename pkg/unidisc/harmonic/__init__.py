"""Harmonic maps"""
