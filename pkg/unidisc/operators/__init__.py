"""Differential operators and weighted norms"""
