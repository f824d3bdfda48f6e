"""Valence counting and boundary traces"""
