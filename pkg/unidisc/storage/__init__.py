"""Run ledger"""
