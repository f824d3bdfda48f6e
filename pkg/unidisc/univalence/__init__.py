"""Univalence criteria and injectivity sampling"""
