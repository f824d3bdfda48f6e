"""Disc geometry and regions"""
