"""Run ledger models and manager"""
