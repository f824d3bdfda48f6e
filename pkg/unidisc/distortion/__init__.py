"""Envelope distortion conditions"""
